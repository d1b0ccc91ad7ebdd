"""Problem configuration: physical parameters, evader routes, validation, JSON I/O.

All quantities are SI (meters, seconds, joules). A configuration is immutable
once validated; solvers treat it as read-only.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Raised by validate_config with every detected violation listed."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration: " + "; ".join(self.errors))


@dataclass(frozen=True)
class SpeedParams:
    stalk_speed_cap: float = 4.0    # pursuer speed bound while stalking, m/s
    chase_speed_p: float = 20.0     # pursuer speed in the open chase, m/s
    chase_speed_e: float = 10.0     # evader escape speed, m/s
    idle_power: float = 3.0         # metabolic power floor, J/s


@dataclass(frozen=True)
class DistanceParams:
    visual_range: float = 0.75      # evader sees the pursuer within this radius, m
    tracking_distance: float = 0.15  # pursuer closes to this separation after hovering, m
    chase_trigger: float = 0.05     # separation at which the pursuer lunges, m
    capture_radius: float = 0.025   # separation that counts as capture, m


@dataclass(frozen=True)
class RateParams:
    """Escape-rate shape: strength * exp(-tolerance * excess^2 / (acuity + angle))."""

    acuity: float = 0.05
    tolerance: float = 0.4
    overall_strength: float | None = None  # required; no physical default


@dataclass(frozen=True)
class GridParams:
    domain_size: float = 4.0
    cells: int = 200
    time_cells: int = 800


@dataclass(frozen=True)
class SearchParams:
    angular_samples: int = 30
    speed_samples: int = 15
    improvement_tol: float = 1e-4
    max_iterations: int = 100


class DriftingLoopRoute:
    """Built-in analytic route: a drifting loop ending on the arrival point."""

    def __init__(self, arrival_time: float = 2.0):
        self.arrival_time = float(arrival_time)

    def waypoint(self, t):
        t = np.asarray(t, dtype=float)
        x = 2.0 + 0.05 * t - np.cos(t)
        y = 1.0 + 0.05 * t ** 2 + np.sin(t)
        return np.stack([x, y], axis=-1)


class SampledRoute:
    """Piecewise-linear route through (t, x, y) samples with strictly increasing t."""

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 3 or samples.shape[0] < 2:
            raise ConfigError(["path.samples must be an (n >= 2, 3) array of (t, x, y) rows"])
        t = samples[:, 0]
        if t[0] != 0.0:
            raise ConfigError(["path.samples must start at t = 0"])
        if not np.all(np.diff(t) > 0):
            raise ConfigError(["path.samples times must be strictly increasing"])
        self.times = t
        self.points = samples[:, 1:]

    @property
    def arrival_time(self) -> float:
        return float(self.times[-1])

    def waypoint(self, t):
        t = np.asarray(t, dtype=float)
        x = np.interp(t, self.times, self.points[:, 0])
        y = np.interp(t, self.times, self.points[:, 1])
        return np.stack([x, y], axis=-1)


@dataclass(eq=False)
class EvaderPath:
    """Evader route f(t) on [0, arrival_time] plus the fixed focal landmark."""

    route: DriftingLoopRoute | SampledRoute = field(default_factory=DriftingLoopRoute)
    focal_point: np.ndarray = field(default_factory=lambda: np.array([1.5, 0.6]))

    def __post_init__(self):
        self.focal_point = np.asarray(self.focal_point, dtype=float).reshape(2)

    @property
    def arrival_time(self) -> float:
        return self.route.arrival_time

    @property
    def arrival_point(self) -> np.ndarray:
        return self.route.waypoint(self.arrival_time)

    def position(self, t):
        """Evader position at time t >= 0; fixed at the arrival point afterwards."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("evader position undefined for t < 0")
        return self.route.waypoint(np.minimum(t, self.arrival_time))


@dataclass(eq=False)
class PursuitConfig:
    speeds: SpeedParams = field(default_factory=SpeedParams)
    distances: DistanceParams = field(default_factory=DistanceParams)
    rate: RateParams = field(default_factory=RateParams)
    path: EvaderPath = field(default_factory=EvaderPath)
    grid: GridParams = field(default_factory=GridParams)
    optimizer: SearchParams = field(default_factory=SearchParams)
    seed: int = 0


ROUTE_SPEED_SLACK = 1.05  # tolerated ratio of sampled route speed to chase_speed_e


def validate_config(cfg: PursuitConfig) -> PursuitConfig:
    """Check every invariant, raising ConfigError with the full violation list."""
    errors = []
    s, d, r, g, o = cfg.speeds, cfg.distances, cfg.rate, cfg.grid, cfg.optimizer

    if not s.stalk_speed_cap > 0:
        errors.append("speeds.stalk_speed_cap must be > 0")
    if not s.chase_speed_e > 0:
        errors.append("speeds.chase_speed_e must be > 0")
    if not s.chase_speed_p > s.chase_speed_e:
        errors.append("speeds.chase_speed_p must exceed chase_speed_e")
    if not s.idle_power >= 0:
        errors.append("speeds.idle_power must be >= 0")

    if not 0 < d.capture_radius < d.chase_trigger:
        errors.append("distances must satisfy 0 < capture_radius < chase_trigger")
    if not d.chase_trigger < d.tracking_distance:
        errors.append("distances.chase_trigger must be below tracking_distance")
    if not d.tracking_distance < d.visual_range:
        errors.append("distances.tracking_distance must be below visual_range")

    if r.overall_strength is None:
        errors.append("rate.overall_strength is required")
    elif not r.overall_strength >= 0:
        errors.append("rate.overall_strength must be >= 0")
    if not r.acuity > 0:
        errors.append("rate.acuity must be > 0")
    if not r.tolerance >= 0:
        errors.append("rate.tolerance must be >= 0")

    if not g.domain_size > 0:
        errors.append("grid.domain_size must be > 0")
    if g.cells < 2:
        errors.append("grid.cells must be >= 2")
    if g.time_cells < 1:
        errors.append("grid.time_cells must be >= 1")

    if o.angular_samples < 1:
        errors.append("optimizer.angular_samples must be >= 1")
    if o.speed_samples < 1:
        errors.append("optimizer.speed_samples must be >= 1")
    if not o.improvement_tol > 0:
        errors.append("optimizer.improvement_tol must be > 0")
    if o.max_iterations < 1:
        errors.append("optimizer.max_iterations must be >= 1")

    if not cfg.path.arrival_time > 0:
        errors.append("path arrival time must be > 0")

    if not errors:
        errors += _route_errors(cfg)

    if errors:
        raise ConfigError(errors)
    return cfg


def _route_errors(cfg: PursuitConfig) -> list:
    """Route-level checks: speed bound, focal-point clearance, domain containment."""
    errors = []
    path, d, g = cfg.path, cfg.distances, cfg.grid
    tt = np.linspace(0.0, path.arrival_time, 2001)
    pts = path.route.waypoint(tt)

    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1) / np.diff(tt)
    if seg.max() > cfg.speeds.chase_speed_e * ROUTE_SPEED_SLACK:
        errors.append("route speed exceeds speeds.chase_speed_e")

    if np.min(np.linalg.norm(pts - path.focal_point, axis=1)) <= 1e-9:
        errors.append("route passes through the focal point")

    # Every visibility disk along the route must fit in the domain square.
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if lo.min() - d.visual_range < 0 or hi.max() + d.visual_range > g.domain_size:
        errors.append("grid.domain_size too small to contain the visibility region")
    return errors


# -- config file round trip ---------------------------------------------------

_SECTIONS = {
    "speeds": ("stalk_speed_cap", "chase_speed_p", "chase_speed_e", "idle_power"),
    "distances": ("visual_range", "tracking_distance", "chase_trigger", "capture_radius"),
    "rate": ("acuity", "tolerance", "overall_strength"),
    "grid": ("domain_size", "cells", "time_cells"),
    "optimizer": ("angular_samples", "speed_samples", "improvement_tol", "max_iterations"),
}


def config_from_dict(data: dict) -> PursuitConfig:
    """Build a validated PursuitConfig from a (possibly partial) plain dict."""
    errors = []
    known_top = set(_SECTIONS) | {"path", "seed"}
    for key in data:
        if key not in known_top:
            errors.append(f"unknown config key: {key}")

    kwargs = {}
    classes = {
        "speeds": SpeedParams,
        "distances": DistanceParams,
        "rate": RateParams,
        "grid": GridParams,
        "optimizer": SearchParams,
    }
    for section, fields in _SECTIONS.items():
        sub = dict(data.get(section, {}))
        for key in list(sub):
            if key not in fields:
                errors.append(f"unknown config key: {section}.{key}")
                sub.pop(key)
        kwargs[section] = classes[section](**sub)

    if errors:
        raise ConfigError(errors)

    kwargs["path"] = _path_from_dict(data.get("path", {}))
    kwargs["seed"] = int(data.get("seed", 0))
    return validate_config(PursuitConfig(**kwargs))


def _path_from_dict(data: dict) -> EvaderPath:
    kind = data.get("kind", "drifting_loop")
    focal = data.get("focal_point", [1.5, 0.6])
    if kind == "drifting_loop":
        route = DriftingLoopRoute(arrival_time=float(data.get("arrival_time", 2.0)))
    elif kind == "samples":
        if "samples" not in data:
            raise ConfigError(["path.kind 'samples' requires path.samples"])
        route = SampledRoute(data["samples"])
    else:
        raise ConfigError([f"unknown path.kind: {kind}"])
    return EvaderPath(route=route, focal_point=np.asarray(focal, dtype=float))


def config_to_dict(cfg: PursuitConfig) -> dict:
    """Plain-dict form of the full resolved config (inverse of config_from_dict)."""
    out = {}
    for section, fields in _SECTIONS.items():
        sub = getattr(cfg, section)
        out[section] = {k: getattr(sub, k) for k in fields}
    if isinstance(cfg.path.route, DriftingLoopRoute):
        path = {"kind": "drifting_loop", "arrival_time": cfg.path.arrival_time}
    else:
        rows = np.column_stack([cfg.path.route.times, cfg.path.route.points])
        path = {"kind": "samples", "samples": rows.tolist()}
    path["focal_point"] = cfg.path.focal_point.tolist()
    out["path"] = path
    out["seed"] = cfg.seed
    return out


def load_config(path) -> PursuitConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def save_config(cfg: PursuitConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_hash(cfg: PursuitConfig) -> str:
    """16-hex-digit digest of the canonical config JSON; keys outputs to inputs."""
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
