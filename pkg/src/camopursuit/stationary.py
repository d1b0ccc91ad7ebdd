"""Post-arrival stalking value on the visibility disk around the arrival point.

Once the evader has landed, its position is fixed and the pursuer circles at
full stalk speed until it lunges (reaching the trigger separation) or the
evader bolts. The expected-energy value W solves a stationary HJB equation,
discretized semi-Lagrangian on the four right-triangle stencils per node and
solved by Gauss-Seidel sweeps over the four diagonal orderings.

Entry into the trigger ball is resolved at the sub-step crossing point: a
stencil segment that pierces the ball pays travel up to the crossing plus the
chase cost at trigger separation. Without this the discrete minimizer leaps
over the expensive shell and lands on cheaper interior boundary values, biasing
the whole field low by O(dx) with a large constant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .chase import chase_energy_from_separation
from .config import PursuitConfig
from .escape import escape_rate
from .grid import Grid, build_grid

# indices into the packed parameter vector handed to the kernels
_P_DX, _P_ZAX, _P_ZAY, _P_EPS2, _P_D2, _P_KS, _P_FP, _P_DRATE, _P_GAMMA, _P_DEPS, _P_N = range(11)

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_XI_TOL = 1e-6


@njit(cache=True)
def _corner_value(w, tmask, i, j, deps):
    if tmask[i, j]:
        return deps
    return w[i, j]


@njit(cache=True)
def _projected_value(w, tmask, px, py, prm):
    """Bilinear read at a pulled-in point; any unreached corner poisons it.

    Poisoning (rather than renormalizing over finite corners) keeps the node
    update monotone in the value field, which is what makes the swept fixed
    point unique and ordering-independent.
    """
    n = int(prm[_P_N])
    dx = prm[_P_DX]
    u = px / dx
    v = py / dx
    i0 = int(np.floor(u))
    j0 = int(np.floor(v))
    if i0 < 0:
        i0 = 0
    if i0 > n - 2:
        i0 = n - 2
    if j0 < 0:
        j0 = 0
    if j0 > n - 2:
        j0 = n - 2
    wx = u - i0
    wy = v - j0
    if wx < 0.0:
        wx = 0.0
    if wx > 1.0:
        wx = 1.0
    if wy < 0.0:
        wy = 0.0
    if wy > 1.0:
        wy = 1.0
    acc = 0.0
    for di in range(2):
        for dj in range(2):
            wgt = (wx if di == 1 else 1.0 - wx) * (wy if dj == 1 else 1.0 - wy)
            if wgt <= 1e-12:
                continue
            cv = _corner_value(w, tmask, i0 + di, j0 + dj, prm[_P_DEPS])
            if not np.isfinite(cv):
                return np.inf
            acc += wgt * cv
    return acc


@njit(cache=True)
def _vertex(w, tmask, i, j, di, dj, prm):
    """Stencil vertex position and value.

    Off-disk vertices are pulled to radius D - 2 dx, two cells inside the rim,
    so every bilinear corner they read is itself a disk node.
    """
    n = int(prm[_P_N])
    dx = prm[_P_DX]
    px = (i + di) * dx
    py = (j + dj) * dx
    rx = px - prm[_P_ZAX]
    ry = py - prm[_P_ZAY]
    d2 = rx * rx + ry * ry
    if d2 <= prm[_P_D2]:
        ii = i + di
        jj = j + dj
        if 0 <= ii < n and 0 <= jj < n:
            return px, py, _corner_value(w, tmask, ii, jj, prm[_P_DEPS])
        return px, py, np.inf
    rin = np.sqrt(prm[_P_D2]) - 2.0 * dx
    scale = rin / np.sqrt(d2)
    px = prm[_P_ZAX] + rx * scale
    py = prm[_P_ZAY] + ry * scale
    return px, py, _projected_value(w, tmask, px, py, prm)


@njit(cache=True)
def _xi_cost(xi, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm):
    tx = xi * p1x + (1.0 - xi) * p2x
    ty = xi * p1y + (1.0 - xi) * p2y
    sx = tx - zx
    sy = ty - zy
    seg2 = sx * sx + sy * sy
    cx = zx - prm[_P_ZAX]
    cy = zy - prm[_P_ZAY]
    # first crossing of the trigger ball along the segment, if any
    if seg2 > 0.0:
        bq = 2.0 * (sx * cx + sy * cy)
        cq = cx * cx + cy * cy - prm[_P_EPS2]
        disc = bq * bq - 4.0 * seg2 * cq
        if disc >= 0.0:
            s1 = (-bq - np.sqrt(disc)) / (2.0 * seg2)
            if 0.0 <= s1 <= 1.0:
                return prm[_P_KS] * s1 * np.sqrt(seg2) / prm[_P_FP] + prm[_P_DEPS]
    if xi <= 0.0:
        wt = v2
    elif xi >= 1.0:
        wt = v1
    else:
        if not (np.isfinite(v1) and np.isfinite(v2)):
            return np.inf
        wt = xi * v1 + (1.0 - xi) * v2
    if not np.isfinite(wt):
        return np.inf
    tau = np.sqrt(seg2) / prm[_P_FP]
    p = np.exp(-lam * tau)
    sep = np.sqrt((tx - prm[_P_ZAX]) ** 2 + (ty - prm[_P_ZAY]) ** 2) - prm[_P_GAMMA]
    if sep < 0.0:
        sep = 0.0
    return prm[_P_KS] * tau + p * wt + (1.0 - p) * sep * prm[_P_DRATE]


@njit(cache=True)
def _simplex_min(zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm):
    """Golden-section over the stencil segment, seeded by 11 uniform samples."""
    best = np.inf
    best_xi = 0.0
    m = 0
    for s in range(11):
        xi = s / 10.0
        c = _xi_cost(xi, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
        if c < best:
            best = c
            best_xi = xi
            m = s
    lo = (m - 1) / 10.0
    hi = (m + 1) / 10.0
    if lo < 0.0:
        lo = 0.0
    if hi > 1.0:
        hi = 1.0
    c_ = hi - _INVPHI * (hi - lo)
    d_ = lo + _INVPHI * (hi - lo)
    fc = _xi_cost(c_, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
    fd = _xi_cost(d_, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
    while hi - lo > _XI_TOL:
        if fc < fd:
            hi = d_
            d_ = c_
            fd = fc
            c_ = hi - _INVPHI * (hi - lo)
            fc = _xi_cost(c_, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
        else:
            lo = c_
            c_ = d_
            fc = fd
            d_ = lo + _INVPHI * (hi - lo)
            fd = _xi_cost(d_, zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
    if fc < best:
        best = fc
        best_xi = c_
    if fd < best:
        best = fd
        best_xi = d_
    return best, best_xi


@njit(cache=True)
def _node_best(w, tmask, i, j, lam, prm):
    """Minimum over the four stencil simplexes; returns (value, vx, vy)."""
    dx = prm[_P_DX]
    zx = i * dx
    zy = j * dx
    ex, ey, ev = _vertex(w, tmask, i, j, 1, 0, prm)
    nx_, ny_, nv = _vertex(w, tmask, i, j, 0, 1, prm)
    wx, wy, wv = _vertex(w, tmask, i, j, -1, 0, prm)
    sx, sy, sv = _vertex(w, tmask, i, j, 0, -1, prm)
    best = np.inf
    bx = 0.0
    by = 0.0
    for s in range(4):
        if s == 0:
            p1x, p1y, v1, p2x, p2y, v2 = ex, ey, ev, nx_, ny_, nv
        elif s == 1:
            p1x, p1y, v1, p2x, p2y, v2 = nx_, ny_, nv, wx, wy, wv
        elif s == 2:
            p1x, p1y, v1, p2x, p2y, v2 = wx, wy, wv, sx, sy, sv
        else:
            p1x, p1y, v1, p2x, p2y, v2 = sx, sy, sv, ex, ey, ev
        val, xi = _simplex_min(zx, zy, p1x, p1y, v1, p2x, p2y, v2, lam, prm)
        if val < best:
            best = val
            tx = xi * p1x + (1.0 - xi) * p2x
            ty = xi * p1y + (1.0 - xi) * p2y
            dist = np.sqrt((tx - zx) ** 2 + (ty - zy) ** 2)
            if dist > 0.0:
                bx = (tx - zx) / dist * prm[_P_FP]
                by = (ty - zy) / dist * prm[_P_FP]
    return best, bx, by


@njit(cache=True)
def _sweep(w, wread, tmask, domain, lam, prm, i0, i1, istep, j0, j1, jstep):
    """One directional sweep with min-updates; returns the largest decrease."""
    maxd = 0.0
    for i in range(i0, i1, istep):
        for j in range(j0, j1, jstep):
            if not domain[i, j] or tmask[i, j]:
                continue
            val, _, _ = _node_best(wread, tmask, i, j, lam[i, j], prm)
            if val < w[i, j]:
                d = w[i, j] - val
                if not np.isfinite(d):
                    d = 1.0  # first finite value at this node, keep iterating
                if d > maxd:
                    maxd = d
                w[i, j] = val
    return maxd


@njit(cache=True)
def _policy_pass(w, tmask, domain, lam, prm):
    n = int(prm[_P_N])
    vx = np.zeros((n, n))
    vy = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if not domain[i, j]:
                continue
            if tmask[i, j]:
                dxs = prm[_P_ZAX] - i * prm[_P_DX]
                dys = prm[_P_ZAY] - j * prm[_P_DX]
                dist = np.sqrt(dxs * dxs + dys * dys)
                if dist > 1e-12:
                    vx[i, j] = dxs / dist * prm[_P_FP]
                    vy[i, j] = dys / dist * prm[_P_FP]
                continue
            _, bx, by = _node_best(w, tmask, i, j, lam[i, j], prm)
            vx[i, j] = bx
            vy[i, j] = by
    return vx, vy


_ORDERINGS = (
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
)


@dataclass(eq=False)
class StationarySolution:
    grid: Grid
    values: np.ndarray       # (nx, ny), +inf outside the disk
    policy: np.ndarray       # (nx, ny, 2) stalk velocity field
    domain_mask: np.ndarray
    trigger_mask: np.ndarray
    cycles: int
    converged: bool
    residual: float          # largest node update in the last cycle


def _pack_params(cfg: PursuitConfig, grid: Grid) -> np.ndarray:
    s, d = cfg.speeds, cfg.distances
    za = cfg.path.arrival_point
    chase_rate = s.idle_power + 0.5 * s.chase_speed_p ** 2
    drate = chase_rate / (s.chase_speed_p - s.chase_speed_e)
    prm = np.zeros(11)
    prm[_P_DX] = grid.dx
    prm[_P_ZAX] = za[0]
    prm[_P_ZAY] = za[1]
    prm[_P_EPS2] = d.chase_trigger ** 2
    prm[_P_D2] = d.visual_range ** 2
    prm[_P_KS] = s.idle_power + 0.5 * s.stalk_speed_cap ** 2
    prm[_P_FP] = s.stalk_speed_cap
    prm[_P_DRATE] = drate
    prm[_P_GAMMA] = d.capture_radius
    prm[_P_DEPS] = (d.chase_trigger - d.capture_radius) * drate
    prm[_P_N] = grid.cells + 1
    return prm


def solve_stationary(cfg: PursuitConfig, grid: Grid | None = None, tol: float = 1e-6,
                     max_cycles: int = 500, mode: str = "gauss-seidel",
                     orderings=None) -> StationarySolution:
    """Solve the post-arrival value by fast sweeping.

    mode "gauss-seidel" updates in place along four diagonal orderings per
    cycle; mode "jacobi" recomputes every node from the previous iterate (same
    fixed point, slower convergence, safe to parallelize).
    """
    if grid is None:
        grid = build_grid(cfg)
    za = cfg.path.arrival_point
    pts = grid.points()
    dist = np.linalg.norm(pts - za, axis=-1)
    domain = dist <= cfg.distances.visual_range
    tmask = dist <= cfg.distances.chase_trigger
    if not tmask.any():
        raise ValueError("grid too coarse: no node falls inside the trigger ball")

    lam = escape_rate(pts, cfg.path.arrival_time, cfg)
    prm = _pack_params(cfg, grid)

    w = np.full(grid.shape, np.inf)
    w[tmask] = chase_energy_from_separation(dist[tmask], cfg)

    n = grid.cells + 1
    bounds = {1: (0, n, 1), -1: (n - 1, -1, -1)}
    orderings = _ORDERINGS if orderings is None else tuple(orderings)

    if mode not in ("gauss-seidel", "jacobi"):
        raise ValueError(f"unknown sweep mode: {mode}")

    converged = False
    cycles = 0
    maxd = np.inf
    for cycle in range(max_cycles):
        cycles = cycle + 1
        maxd = 0.0
        if mode == "gauss-seidel":
            for oi, oj in orderings:
                i0, i1, istep = bounds[oi]
                j0, j1, jstep = bounds[oj]
                d = _sweep(w, w, tmask, domain, lam, prm, i0, i1, istep, j0, j1, jstep)
                maxd = max(maxd, d)
        else:
            wread = w.copy()
            maxd = _sweep(w, wread, tmask, domain, lam, prm, 0, n, 1, 0, n, 1)
        if maxd < tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"stationary solve hit the cycle cap ({max_cycles}) with residual {maxd:.3e} J",
            stacklevel=2,
        )

    vx, vy = _policy_pass(w, tmask, domain, lam, prm)
    policy = np.stack([vx, vy], axis=-1)
    return StationarySolution(
        grid=grid, values=w, policy=policy, domain_mask=domain, trigger_mask=tmask,
        cycles=cycles, converged=converged, residual=float(maxd),
    )
