"""Scikit-learn style front end over the solve-then-trace pipeline.

fit() solves the pursuit fields for the configured scenario; predict(X) maps
start points to the camouflage fraction of the deterministic trace from each.
The estimator holds plain init params only, per the sklearn contract, so
get_params/set_params/clone compose with model-selection tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .config import config_from_dict
from .timedep import solve_time_dependent
from .tracer import _OK, _advance


class MotionCamouflagePlanner(BaseEstimator):
    """Plans energy-optimal stalking for one scenario configuration.

    Parameters
    ----------
    config : dict | None
        Scenario description in the config schema (speeds, distances, rate,
        path, grid, optimizer, seed). Must carry rate.overall_strength.

    After fit, config_ holds the parsed configuration, solution_ the solved
    time-dependent fields, and stationary_ the post-arrival stage solution.
    predict returns one fraction per row of X; rows whose trace fails (never
    visible, or fields unvalued along the walk) come back as NaN.
    """

    def __init__(self, config: dict | None = None):
        self.config = config

    def fit(self, X=None, y=None):
        """Solve the fields for the configured scenario; X and y are unused."""
        self.config_ = config_from_dict(self.config or {})
        self.solution_ = solve_time_dependent(self.config_)
        self.stationary_ = self.solution_.stationary
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Camouflage fraction of the deterministic trace from each start."""
        check_is_fitted(self, "solution_")
        X = check_array(X, dtype=float, ensure_2d=True)
        if X.shape[1] != 2:
            raise ValueError(f"start points must have 2 columns, got {X.shape[1]}")
        res = _advance(X, self.solution_, self.config_)
        ok = (res.status == _OK) & (res.amc_den > 0)
        den = np.where(res.amc_den > 0, res.amc_den, 1)
        out = np.where(ok, res.amc_num / den, np.nan)
        return out
