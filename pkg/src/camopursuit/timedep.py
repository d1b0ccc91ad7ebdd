"""Pre-arrival value and policy by backward semi-Lagrangian time stepping.

Each slice classifies nodes into four kinds: inside the moving trigger ball
(chase boundary value), within visual range (full control search over the
speed disk), out of sight but due to regain it (hover-then-track value), and
permanently blind (infinite). Slices depend only on later slices, so one
backward pass fills the whole stack.

A control whose step segment pierces the trigger ball is charged up to the
crossing point plus the chase cost at trigger separation, mirroring the
stationary solver's treatment; reads of the next slice near the ball use the
trigger-separation chase cost at ball nodes for the same reason.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chase import chase_energy_from_separation
from .config import PursuitConfig
from .escape import escape_rate, survival_probability
from .grid import Grid, build_grid, interp2_or_inf, visibility_stacks
from .hitandrun import candidate_grid, refine_batch
from .stationary import StationarySolution, solve_stationary

_SL_STREAM = 101  # seed-stream tag for per-slice refinement draws


@dataclass(eq=False)
class TimeDependentSolution:
    grid: Grid
    values: np.ndarray     # (nt+1, nx, ny)
    policy: np.ndarray     # (nt+1, nx, ny, 2)
    visible: np.ndarray    # (nt+1, nx, ny) bool
    ever: np.ndarray       # (nt+1, nx, ny) bool
    stationary: StationarySolution


def _trigger_sub(values: np.ndarray, dist: np.ndarray, eps: float, delta_eps: float) -> np.ndarray:
    """Copy of a value slice with trigger-ball nodes pinned to the rim chase cost.

    Stepping past the rim is resolved at the crossing, so foot interpolation
    must never mix in the cheaper inside-the-ball boundary values.
    """
    out = values.copy()
    out[dist <= eps] = delta_eps
    return out


def _blind_patch(un_sub, grid, pts, ever_next, route_tail, band_r, cfg):
    """Read copy with permanently blind nodes near the visual rim filled in.

    A control foot can land up to one step beyond the current visual disk, so
    bilinear corners may fall on nodes the evader will never see again, whose
    stored value is the infinite sentinel. Treating those corners literally
    poisons every rim read, and the dead band then grows by roughly a stencil
    width per backward step until it swallows the trailing half of the disk.
    Each such corner instead stands in for the nearest position still visible
    at some remaining time: fill it with the value interpolated at the node's
    radial projection onto the closest remaining route disk, pulled two cell
    widths inside so the projected read has clean corners. Only this read copy
    is patched; stored slices keep the sentinel on blind nodes.
    """
    rin = cfg.distances.visual_range - 2.0 * grid.dx
    if rin <= 0.0:
        return un_sub
    band = ~ever_next & (np.linalg.norm(pts - route_tail[0], axis=-1) <= band_r)
    if not band.any():
        return un_sub
    z = pts[band]
    seps = np.linalg.norm(z[:, None, :] - route_tail[None, :, :], axis=-1)
    pick = np.argmin(seps, axis=1)
    centers = route_tail[pick]
    nearest = seps[np.arange(z.shape[0]), pick]
    proj = centers + (z - centers) * (rin / nearest)[:, None]
    out = un_sub.copy()
    out[band] = interp2_or_inf(un_sub, grid, proj)
    return out


class _SliceObjective:
    """Vectorized step cost for a batch of nodes against the next slice."""

    def __init__(self, zpos, p, un_sub, grid, ball, cfg, dt, terminal):
        self.zpos = zpos
        self.p = p
        self.un_sub = un_sub
        self.grid = grid
        self.ball = ball
        self.cfg = cfg
        self.dt = dt
        self.terminal = terminal
        d = cfg.distances
        s = cfg.speeds
        self.eps2 = d.chase_trigger ** 2
        self.idle = s.idle_power
        self.delta_eps = chase_energy_from_separation(d.chase_trigger, cfg)

    def __call__(self, vels: np.ndarray) -> np.ndarray:
        single = vels.ndim == 2
        v = vels[:, None, :] if single else vels
        dt = self.dt
        kcost = dt * (self.idle + 0.5 * (v ** 2).sum(-1))
        feet = self.zpos[:, None, :] + dt * v

        cz = self.zpos - self.ball
        cq = (cz ** 2).sum(-1) - self.eps2
        seg = dt * v
        seg2 = (seg ** 2).sum(-1)
        bq = 2.0 * (seg * cz[:, None, :]).sum(-1)
        disc = bq * bq - 4.0 * seg2 * cq[:, None]
        movable = seg2 > 0.0
        s1 = np.where(
            movable & (disc >= 0.0),
            (-bq - np.sqrt(np.maximum(disc, 0.0))) / np.where(movable, 2.0 * seg2, 1.0),
            -1.0,
        )
        crossing = (s1 >= 0.0) & (s1 <= 1.0) & (cq[:, None] > 0.0)

        foot_d2 = ((feet - self.ball) ** 2).sum(-1)
        foot_sep = np.sqrt(foot_d2)
        inside = foot_d2 <= self.eps2

        vals = interp2_or_inf(self.un_sub, self.grid, feet)
        if self.terminal:
            # next slice is the arrival slice, where the escape branch and the
            # continuation are the same stationary field
            cost = kcost + vals
        else:
            deltas = chase_energy_from_separation(foot_sep, self.cfg)
            pp = self.p[:, None]
            cost = kcost + pp * vals + (1.0 - pp) * deltas
        cost = np.where(inside & ~crossing,
                        kcost + chase_energy_from_separation(foot_sep, self.cfg), cost)
        cost = np.where(crossing, kcost * s1 + self.delta_eps, cost)
        return cost[:, 0] if single else cost


def _track_from(z0, m, values, grid, cfg, route_xy, trig_dist):
    """Track the evader at full speed from grid time m; returns hover payoffs.

    Forward Euler on the unit line-of-sight law until separation drops to the
    tracking distance or the horizon; survival accumulates left-endpoint rate
    samples along the way.
    """
    n = z0.shape[0]
    nt = grid.time_cells
    s_sp, d = cfg.speeds, cfg.distances
    eps = d.chase_trigger
    delta_eps = chase_energy_from_separation(eps, cfg)
    k_full = s_sp.idle_power + 0.5 * s_sp.stalk_speed_cap ** 2

    zp = z0.astype(float).copy()
    active = np.ones(n, dtype=bool)
    acc = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)
    end_idx = np.full(n, nt, dtype=np.int64)
    zhat = zp.copy()

    for s in range(m, nt + 1):
        off = route_xy[s] - zp[active]
        dist = np.linalg.norm(off, axis=1)
        done = dist <= d.tracking_distance
        if done.any():
            ids = np.flatnonzero(active)[done]
            end_idx[ids] = s
            zhat[ids] = zp[ids]
            active[ids] = False
        if s == nt or not active.any():
            break
        live = np.flatnonzero(active)
        acc[live] += escape_rate(zp[live], grid.times[s], cfg) * grid.dt
        off = route_xy[s] - zp[live]
        dist = np.linalg.norm(off, axis=1)
        zp[live] += grid.dt * s_sp.stalk_speed_cap * off / dist[:, None]
        steps[live] += 1
    if active.any():
        ids = np.flatnonzero(active)
        end_idx[ids] = nt
        zhat[ids] = zp[ids]

    p = np.exp(-acc)
    tau = steps * grid.dt
    u_hat = np.empty(n)
    for s in np.unique(end_idx):
        sel = end_idx == s
        sub = _trigger_sub(values[s], trig_dist(s), eps, delta_eps)
        u_hat[sel] = interp2_or_inf(sub, grid, zhat[sel])

    if m == nt:
        bolt = values[nt][tuple(np.round(z0.T / grid.dx).astype(np.int64))]
    else:
        bolt = chase_energy_from_separation(np.linalg.norm(z0 - route_xy[m], axis=1), cfg)
    return p * (u_hat + k_full * tau) + (1.0 - p) * bolt


def solve_time_dependent(cfg: PursuitConfig, grid: Grid | None = None,
                         stationary: StationarySolution | None = None) -> TimeDependentSolution:
    """Backward solve of the pre-arrival expected-energy field and its policy."""
    if grid is None:
        grid = build_grid(cfg)
    if stationary is None:
        stationary = solve_stationary(cfg, grid)

    nt = grid.time_cells
    dt = grid.dt
    pts = grid.points()
    s_sp, d = cfg.speeds, cfg.distances
    eps = d.chase_trigger
    delta_eps = chase_energy_from_separation(eps, cfg)
    fp = s_sp.stalk_speed_cap

    route_xy = cfg.path.position(grid.times)
    visible, ever = visibility_stacks(grid, cfg)
    cands = candidate_grid(fp, cfg.optimizer)

    values = np.full((nt + 1,) + grid.shape, np.inf)
    policy = np.zeros((nt + 1,) + grid.shape + (2,))
    values[nt] = stationary.values
    policy[nt] = stationary.policy

    def trig_dist(k):
        return np.linalg.norm(pts - route_xy[k], axis=-1)

    # hover bookkeeping: next visible slice per node and the cached payoff of
    # hovering until then and tracking back into range
    next_vis = np.full(grid.shape, -1, dtype=np.int64)
    next_vis[visible[nt]] = nt
    track_val = np.full(grid.shape, np.nan)

    for k in range(nt - 1, -1, -1):
        onset = visible[k + 1] & ~visible[k]
        if onset.any():
            track_val[onset] = _track_from(
                pts[onset], k + 1, values, grid, cfg, route_xy, trig_dist)

        dist_k = trig_dist(k)
        capture = dist_k <= eps
        sl_mask = visible[k] & ~capture
        hover = ever[k] & ~visible[k]

        if capture.any():
            values[k][capture] = chase_energy_from_separation(dist_k[capture], cfg)
            off = route_xy[k] - pts[capture]
            nrm = np.linalg.norm(off, axis=1)
            safe = nrm > 1e-12
            policy[k][capture] = np.where(safe[:, None], fp * off / np.where(safe, nrm, 1.0)[:, None], 0.0)

        if sl_mask.any():
            zpos = pts[sl_mask]
            lam = escape_rate(zpos, grid.times[k], cfg)
            p = np.exp(-dt * lam)
            un_sub = _trigger_sub(values[k + 1], trig_dist(k + 1), eps, delta_eps)
            drift = np.linalg.norm(route_xy[k + 1] - route_xy[k])
            band_r = d.visual_range + fp * dt + drift + 1.5 * grid.dx
            un_read = _blind_patch(un_sub, grid, pts, ever[k + 1],
                                   route_xy[k + 1:], band_r, cfg)
            obj = _SliceObjective(zpos, p, un_read, grid, route_xy[k + 1], cfg, dt,
                                  terminal=(k + 1 == nt))
            coarse = obj(np.broadcast_to(cands, (zpos.shape[0],) + cands.shape))
            best = np.argmin(coarse, axis=1)
            v0 = cands[best]
            j0 = coarse[np.arange(zpos.shape[0]), best]
            rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, _SL_STREAM, k)))
            draws = rng.random((zpos.shape[0], cfg.optimizer.max_iterations, 2))
            v_star, j_star = refine_batch(obj, v0, j0, fp, cfg.optimizer, draws)
            values[k][sl_mask] = j_star
            policy[k][sl_mask] = v_star

        if hover.any():
            m = next_vis[hover]
            values[k][hover] = s_sp.idle_power * dt * (m - k) + track_val[hover]

        next_vis[visible[k]] = k

    return TimeDependentSolution(grid=grid, values=values, policy=policy,
                                 visible=visible, ever=ever, stationary=stationary)
