"""Velocity search over the stalk control disk.

A polar coarse grid seeds the incumbent, then hit-and-run refinement proposes
random unit-ball offsets from the newest accepted point, clipping radially to
the speed cap and accepting only improvements. All randomness comes in as
pre-drawn uniforms so batched (per-grid-node) and scalar runs are identical.
"""

from __future__ import annotations

import numpy as np

from .config import SearchParams


class NoFeasibleControlError(RuntimeError):
    """Every sampled control had infinite cost."""


def candidate_grid(speed_cap: float, params: SearchParams) -> np.ndarray:
    """Polar coarse candidates in tie-break order: speed-major, angle-minor."""
    a, b = params.angular_samples, params.speed_samples
    theta = 2.0 * np.pi * np.arange(a + 1) / a
    speed = speed_cap * np.arange(b + 1) / b
    vx = np.outer(speed, np.cos(theta)).ravel()
    vy = np.outer(speed, np.sin(theta)).ravel()
    return np.column_stack([vx, vy])


def coarse_search_batch(values: np.ndarray, candidates: np.ndarray):
    """Pick per-row incumbents from precomputed candidate values (M, C).

    Ties resolve to the lowest candidate index, i.e. smallest (speed, angle).
    """
    idx = np.argmin(values, axis=1)
    rows = np.arange(values.shape[0])
    return candidates[idx], values[rows, idx]


def refine_batch(objective, v0: np.ndarray, j0: np.ndarray, speed_cap: float,
                 params: SearchParams, draws: np.ndarray):
    """Hit-and-run refinement of per-row incumbents.

    objective maps (M, 2) velocities to (M,) costs; draws is (M, cap, 2) uniform
    in [0, 1). Rows stop after an accepted step improves by less than the
    tolerance, or at the proposal cap; rows with infinite incumbents are left
    untouched.
    """
    v = np.array(v0, dtype=float, copy=True)
    j = np.array(j0, dtype=float, copy=True)
    done = ~np.isfinite(j)
    for r in range(params.max_iterations):
        if done.all():
            break
        ang = 2.0 * np.pi * draws[:, r, 0]
        step = draws[:, r, 1]
        prop = v + np.column_stack([step * np.cos(ang), step * np.sin(ang)])
        speed = np.linalg.norm(prop, axis=1)
        over = speed > speed_cap
        if np.any(over):
            prop[over] *= (speed_cap / speed[over])[:, None]
        jp = objective(prop)
        accept = ~done & (jp < j)
        gain = j - jp
        v[accept] = prop[accept]
        j[accept] = jp[accept]
        done |= accept & (gain < params.improvement_tol)
    return v, j


def coarse_search(objective, speed_cap: float, params: SearchParams):
    """Scalar coarse search; objective maps one velocity (2,) to a cost."""
    cands = candidate_grid(speed_cap, params)
    values = np.array([objective(c) for c in cands], dtype=float)
    if not np.any(np.isfinite(values)):
        raise NoFeasibleControlError("all coarse control candidates cost +inf")
    v, j = coarse_search_batch(values[None, :], cands)
    return v[0], float(j[0])


def refine(objective, incumbent, value: float, speed_cap: float, params: SearchParams,
           rng: np.random.Generator):
    """Scalar refinement around one incumbent; draws taken from rng in order."""
    draws = rng.random((1, params.max_iterations, 2))

    def batch_objective(vv):
        return np.array([objective(vv[0])], dtype=float)

    v, j = refine_batch(
        batch_objective, np.asarray(incumbent, float)[None, :], np.array([value], float),
        speed_cap, params, draws,
    )
    return v[0], float(j[0])
