"""Energy-optimal stalking policies for a pursuer hiding in an evader's motion blind spot."""

from .chase import (
    capture_time,
    capture_time_from_separation,
    chase_direction,
    chase_energy,
    chase_energy_from_separation,
)
from .config import (
    ConfigError,
    DistanceParams,
    DriftingLoopRoute,
    EvaderPath,
    GridParams,
    PursuitConfig,
    RateParams,
    SampledRoute,
    SearchParams,
    SpeedParams,
    config_from_dict,
    config_hash,
    config_to_dict,
    load_config,
    save_config,
    validate_config,
)
from .escape import DegenerateGeometryError, angular_displacement, escape_rate, survival_probability
from .estimator import MotionCamouflagePlanner
from .grid import (
    Grid,
    build_grid,
    field_to_csv,
    interp2,
    interp3,
    read_field_dump,
    write_field_dump,
)
from .simulate import (
    RolloutResult,
    batch_rollouts,
    estimate_expected_cost,
    rollout,
    rollouts_to_csv,
    sample_escape,
    validation_report,
)
from .stationary import StationarySolution, solve_stationary
from .stats import BatchSummary, batch_amc, sample_starts, scatter_to_csv, summary_to_json
from .timedep import TimeDependentSolution, solve_time_dependent
from .tracer import (
    AMC_ANGLE,
    InfeasibleStartError,
    PolicyConsistencyError,
    Trajectory,
    TrajectorySample,
    amc_fraction,
    trace,
    trajectory_to_csv,
)

__all__ = [
    "AMC_ANGLE",
    "BatchSummary",
    "ConfigError",
    "DegenerateGeometryError",
    "DistanceParams",
    "DriftingLoopRoute",
    "EvaderPath",
    "Grid",
    "GridParams",
    "InfeasibleStartError",
    "MotionCamouflagePlanner",
    "PolicyConsistencyError",
    "PursuitConfig",
    "RateParams",
    "RolloutResult",
    "SampledRoute",
    "SearchParams",
    "SpeedParams",
    "StationarySolution",
    "TimeDependentSolution",
    "Trajectory",
    "TrajectorySample",
    "amc_fraction",
    "angular_displacement",
    "batch_amc",
    "batch_rollouts",
    "build_grid",
    "capture_time",
    "capture_time_from_separation",
    "chase_direction",
    "chase_energy",
    "chase_energy_from_separation",
    "config_from_dict",
    "config_hash",
    "config_to_dict",
    "escape_rate",
    "estimate_expected_cost",
    "field_to_csv",
    "interp2",
    "interp3",
    "load_config",
    "read_field_dump",
    "rollout",
    "rollouts_to_csv",
    "sample_escape",
    "sample_starts",
    "save_config",
    "scatter_to_csv",
    "solve_stationary",
    "solve_time_dependent",
    "summary_to_json",
    "survival_probability",
    "trace",
    "trajectory_to_csv",
    "validate_config",
    "validation_report",
    "write_field_dump",
]
