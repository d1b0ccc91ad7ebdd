"""Evader escape model: a position-dependent hazard that fades in the motion blind spot.

The evader bolts as a non-homogeneous Poisson event. Inside the trigger disk the
rate is the full strength A; within visual range it decays with the squared
excess separation, softened by the angular displacement of the pursuer from the
line to the focal landmark (the blind spot); outside visual range it is zero.
"""

from __future__ import annotations

import numpy as np

from .config import PursuitConfig


class DegenerateGeometryError(ValueError):
    """Angular displacement undefined: pursuer or landmark sits on the evader."""


def angular_displacement(z, t, cfg: PursuitConfig):
    """Angle at the evader between the pursuer and the focal landmark, in [0, pi]."""
    z = np.asarray(z, dtype=float)
    ze = cfg.path.position(t)
    r = z - ze
    rs = cfg.path.focal_point - ze
    dist = np.linalg.norm(r, axis=-1)
    ns = np.linalg.norm(rs, axis=-1)
    if np.any(dist < 1e-12) or np.any(ns < 1e-12):
        raise DegenerateGeometryError("pursuer or focal point coincides with the evader")
    cosv = np.clip((r * rs).sum(axis=-1) / (dist * ns), -1.0, 1.0)
    theta = np.arccos(cosv)
    return float(theta) if theta.ndim == 0 else theta


def escape_rate(z, t, cfg: PursuitConfig):
    """Poisson escape rate at pursuer position(s) z and time(s) t, 1/s."""
    z = np.asarray(z, dtype=float)
    ze = cfg.path.position(t)
    r = z - ze
    rs = cfg.path.focal_point - ze
    dist, ns, dots = np.broadcast_arrays(
        np.linalg.norm(r, axis=-1),
        np.linalg.norm(rs, axis=-1),
        (r * rs).sum(axis=-1),
    )
    a = cfg.rate.overall_strength
    b = cfg.rate.acuity
    c = cfg.rate.tolerance
    eps = cfg.distances.chase_trigger
    vis = cfg.distances.visual_range

    out = np.zeros(dist.shape)
    out[dist <= eps] = a

    ring = (dist > eps) & (dist <= vis)
    near = ring & (ns <= vis)  # landmark in view: blind-spot softening applies
    if np.any(near):
        if np.any(ns[near] < 1e-12):
            raise DegenerateGeometryError("focal point coincides with the evader")
        cosv = np.clip(dots[near] / (dist[near] * ns[near]), -1.0, 1.0)
        theta = np.arccos(cosv)
        out[near] = a * np.exp(-c * (dist[near] - eps) ** 2 / (b + theta))

    far = ring & (ns > vis)
    out[far] = a * np.exp(-c * (dist[far] - eps) ** 2)
    return float(out) if out.ndim == 0 else out


def survival_probability(points, times, cfg: PursuitConfig) -> float:
    """No-escape probability along a sampled path, left-endpoint hazard sum.

    points: (n, 2) pursuer positions, times: (n,) increasing timestamps.
    Fewer than two samples carry no exposure.
    """
    points = np.asarray(points, dtype=float)
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        return 1.0
    rates = escape_rate(points[:-1], times[:-1], cfg)
    return float(np.exp(-np.sum(rates * np.diff(times))))
