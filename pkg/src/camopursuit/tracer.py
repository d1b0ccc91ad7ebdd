"""Trajectory reconstruction from the solved policy fields.

A trace walks the pursuer forward in grid-time steps through up to four
phases: hover (out of the evader's sight, waiting), track (closing to the
tracking distance at full stalk speed), stalk (following the interpolated
minimizing velocity), and the analytic line-of-centers chase after the
switch. The switch fires on entering the trigger ball, detected at the
sub-step segment crossing against the ball at the end-of-step evader
position so realized chase costs match the solver's discretization, or at
a supplied escape time in stochastic mode.

The stepping core is batched: all starts advance together one time step at
a time, which is what makes the sampled statistics affordable. Single
traces run the same core with per-step recording switched on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chase import capture_time_from_separation, chase_energy_from_separation
from .config import PursuitConfig
from .escape import angular_displacement
from .grid import format_value, interp2_or_inf
from .ioutil import atomic_write_bytes
from .timedep import TimeDependentSolution

AMC_ANGLE = 0.0087266  # rad; bearing drift below this is unresolvable to the evader

PHASES = ("hover", "track", "stalk", "chase")
_HOVER, _TRACK, _STALK = 0, 1, 2

_OK, _INFEASIBLE, _POLICY_HOLE, _NO_TRIGGER = 0, 1, 2, 3

TRAJECTORY_CSV_HEADER = "t,x_P,y_P,x_E,y_E,phase,vx,vy,theta_sharp,amc"


class InfeasibleStartError(ValueError):
    """Start point is never within the evader's visual range at any grid time."""


class PolicyConsistencyError(RuntimeError):
    """Trace reached a state the solve left unvalued, or never triggered."""


@dataclass
class TrajectorySample:
    t: float
    z_p: np.ndarray
    z_e: np.ndarray
    phase: str
    velocity: np.ndarray
    theta_sharp: float | None
    amc: bool


@dataclass
class Trajectory:
    """One pursuit from start to capture.

    amc_fraction counts flagged samples against every pre-chase sample the
    evader could perceive: stalk samples plus any hover or track samples
    taken at or inside visual range. It is None when no stalk step exists.
    """

    samples: list
    switch_time: float
    capture_time: float
    stalk_energy: float
    chase_energy: float
    amc_fraction: float | None


def amc_fraction(traj: Trajectory) -> float | None:
    """Fraction of flagged stalk samples; None without any stalk step."""
    stalk = [s for s in traj.samples if s.phase == "stalk"]
    if not stalk:
        return None
    return sum(1 for s in stalk if s.amc) / len(stalk)


@dataclass
class _BatchResult:
    status: np.ndarray        # per-trace outcome code
    switch_time: np.ndarray   # T_s
    switch_zp: np.ndarray     # pursuer at the switch
    switch_ze: np.ndarray     # evader position the chase is reckoned from
    switch_sep: np.ndarray    # separation the chase starts from
    amc_num: np.ndarray
    amc_den: np.ndarray
    stalk_energy: np.ndarray
    pursuit_cost: np.ndarray  # hover + track + stalk energy up to the switch
    records: list | None


def _advance(z0s, solution: TimeDependentSolution, cfg: PursuitConfig,
             escape_times=None, record=False) -> _BatchResult:
    """March a batch of starts to their chase switches; the chase is analytic."""
    grid = solution.grid
    nt = grid.time_cells
    dt = grid.dt
    d, s_sp = cfg.distances, cfg.speeds
    eps = d.chase_trigger
    fp = s_sp.stalk_speed_cap
    idle = s_sp.idle_power
    k_track = idle + 0.5 * fp * fp

    z = np.asarray(z0s, dtype=float).copy()
    n = z.shape[0]
    esc = np.full(n, np.inf) if escape_times is None else np.asarray(escape_times, dtype=float)

    route_xy = cfg.path.position(grid.times)

    status = np.zeros(n, dtype=np.int8)
    in_hull = ((z >= 0.0) & (z <= grid.domain_size)).all(axis=1)
    seps0 = np.linalg.norm(z[:, None, :] - route_xy[None, :, :], axis=-1)
    status[~(in_hull & (seps0.min(axis=1) <= d.visual_range))] = _INFEASIBLE

    phase = np.where(seps0[:, 0] <= d.visual_range, _STALK, _HOVER).astype(np.int8)
    active = status == _OK
    switch_time = np.full(n, np.nan)
    switch_zp = np.full((n, 2), np.nan)
    switch_ze = np.full((n, 2), np.nan)
    switch_sep = np.full(n, np.nan)
    amc_num = np.zeros(n, dtype=np.int64)
    amc_den = np.zeros(n, dtype=np.int64)
    stalk_energy = np.zeros(n)
    pursuit_cost = np.zeros(n)
    records = [] if record else None

    def switch(ids, t_s, zp, ze):
        switch_time[ids] = t_s
        switch_zp[ids] = zp
        switch_ze[ids] = ze
        switch_sep[ids] = np.linalg.norm(zp - ze, axis=-1)
        active[ids] = False

    # past the horizon the evader parks on the arrival point and the pursuit
    # runs under the stationary fields; cap how long we allow that to take
    post_cap = int(np.ceil(np.sqrt(2.0) * grid.domain_size / (fp * dt))) * 3 + 50
    k = 0
    while active.any() and k <= nt + post_cap:
        t_k = grid.times[k] if k <= nt else grid.arrival_time + (k - nt) * dt
        ze_k = route_xy[min(k, nt)]
        ze_next = route_xy[min(k + 1, nt)]
        if k < nt:
            vals_k = solution.values[k]
            pol_k = solution.policy[k]
        else:
            vals_k = solution.stationary.values
            pol_k = solution.stationary.policy
        fin_k = np.isfinite(vals_k).astype(float)

        ids = np.flatnonzero(active)
        zi = z[ids]
        sep = np.linalg.norm(zi - ze_k, axis=1)

        hit = sep <= eps
        if hit.any():
            switch(ids[hit], t_k, zi[hit], np.broadcast_to(ze_k, (int(hit.sum()), 2)))
            ids, zi, sep = ids[~hit], zi[~hit], sep[~hit]
            if ids.size == 0:
                k += 1
                continue

        bolt = esc[ids] <= t_k + 1e-12
        if bolt.any():
            switch(ids[bolt], esc[ids[bolt]], zi[bolt],
                   np.broadcast_to(ze_k, (int(bolt.sum()), 2)))
            ids, zi, sep = ids[~bolt], zi[~bolt], sep[~bolt]
            if ids.size == 0:
                k += 1
                continue

        ph = phase[ids]
        ph = np.where((ph == _HOVER) & (sep <= d.visual_range), _TRACK, ph)
        ph = np.where((ph == _TRACK) & (sep <= d.tracking_distance), _STALK, ph)
        phase[ids] = ph

        support = interp2_or_inf(fin_k, grid, zi)
        hole = ~(np.isfinite(support) & (support > 1e-12))
        if hole.any():
            status[ids[hole]] = _POLICY_HOLE
            active[ids[hole]] = False
            ids, zi, sep, ph = ids[~hole], zi[~hole], sep[~hole], ph[~hole]
            if ids.size == 0:
                k += 1
                continue

        vel = np.zeros_like(zi)
        tracking = ph == _TRACK
        if tracking.any():
            off = ze_k - zi[tracking]
            vel[tracking] = fp * off / np.linalg.norm(off, axis=1)[:, None]
        stalking = ph == _STALK
        if stalking.any():
            vel[stalking, 0] = interp2_or_inf(pol_k[..., 0], grid, zi[stalking])
            vel[stalking, 1] = interp2_or_inf(pol_k[..., 1], grid, zi[stalking])

        theta = np.full(ids.shape, np.nan)
        if stalking.any():
            theta[stalking] = angular_displacement(zi[stalking], t_k, cfg)
        flag = stalking & (theta <= AMC_ANGLE)
        amc_num[ids] += flag
        amc_den[ids] += stalking | (sep <= d.visual_range)

        if record:
            records.append((t_k, ids.copy(), zi.copy(), ze_k.copy(), ph.copy(),
                            vel.copy(), theta.copy(), flag.copy()))

        # earliest in-step event: trigger-ball crossing (tested against the
        # ball at the end-of-step evader position, as in the solver) or escape
        seg = dt * vel
        seg2 = (seg ** 2).sum(axis=1)
        cz = zi - ze_next
        cq = (cz ** 2).sum(axis=1) - eps * eps
        bq = 2.0 * (seg * cz).sum(axis=1)
        disc = bq * bq - 4.0 * seg2 * cq
        movable = seg2 > 0.0
        s1 = np.where(movable & (disc >= 0.0),
                      (-bq - np.sqrt(np.maximum(disc, 0.0))) / np.where(movable, 2.0 * seg2, 1.0),
                      np.inf)
        s_trig = np.where((s1 >= 0.0) & (s1 <= 1.0) & (cq > 0.0), s1, np.inf)
        foot_inside = ((zi + seg - ze_next) ** 2).sum(axis=1) <= eps * eps
        s_trig = np.where(np.isinf(s_trig) & foot_inside, 1.0, s_trig)

        s_esc = (esc[ids] - t_k) / dt
        s_esc = np.where((s_esc >= 0.0) & (s_esc < 1.0), s_esc, np.inf)

        trigger_won = s_trig <= s_esc
        s_star = np.where(trigger_won, s_trig, s_esc)
        rate = np.where(ph == _HOVER, idle, np.where(ph == _TRACK, k_track,
                        idle + 0.5 * (vel ** 2).sum(axis=1)))
        frac = np.minimum(s_star, 1.0)
        pursuit_cost[ids] += rate * frac * dt
        stalk_energy[ids] += np.where(stalking, rate * frac * dt, 0.0)

        ends = s_star <= 1.0
        if ends.any():
            s_e = s_star[ends]
            zp_e = zi[ends] + s_e[:, None] * seg[ends]
            t_e = t_k + s_e * dt
            # a trigger switch is reckoned against the ball it was tested on,
            # so the chase starts at the trigger separation exactly; an escape
            # switch is reckoned from the evader's position at the escape time
            ze_e = np.where(trigger_won[ends, None],
                            np.broadcast_to(ze_next, (int(ends.sum()), 2)),
                            np.asarray(cfg.path.position(t_e), dtype=float))
            switch(ids[ends], t_e, zp_e, ze_e)

        cont = ~ends
        z[ids[cont]] = zi[cont] + seg[cont]
        k += 1

    status[active] = _NO_TRIGGER
    return _BatchResult(status=status, switch_time=switch_time, switch_zp=switch_zp,
                        switch_ze=switch_ze, switch_sep=switch_sep,
                        amc_num=amc_num, amc_den=amc_den,
                        stalk_energy=stalk_energy, pursuit_cost=pursuit_cost,
                        records=records)


def _raise_for_status(code: int, z0) -> None:
    if code == _INFEASIBLE:
        raise InfeasibleStartError(
            f"start {tuple(np.asarray(z0, float))} is never within visual range")
    if code == _POLICY_HOLE:
        raise PolicyConsistencyError(
            "trace entered a region the solve left unvalued; fields and config disagree")
    if code == _NO_TRIGGER:
        raise PolicyConsistencyError(
            "trace never reached the trigger ball; fields and config disagree")


def trace(z0, solution: TimeDependentSolution, cfg: PursuitConfig,
          mode: str = "deterministic", escape_time: float | None = None) -> Trajectory:
    """Full pursuit trajectory from z0 at t = 0 under the solved policy.

    Deterministic mode ignores escape entirely and switches to the chase only
    on entering the trigger ball; stochastic mode also switches at the given
    escape time. The chase tail is appended in closed form; its last sample
    lands on the capture time itself, off the step lattice.
    """
    if mode not in ("deterministic", "stochastic"):
        raise ValueError(f"unknown trace mode: {mode!r}")
    if mode == "stochastic":
        if escape_time is None or escape_time < 0.0:
            raise ValueError("stochastic mode needs a nonnegative escape time")
        esc = np.array([float(escape_time)])
    else:
        if escape_time is not None:
            raise ValueError("deterministic mode takes no escape time")
        esc = None

    z0 = np.asarray(z0, dtype=float)
    res = _advance(z0[None, :], solution, cfg, escape_times=esc, record=True)
    _raise_for_status(int(res.status[0]), z0)

    samples = []
    for t_k, ids, zi, ze_k, ph, vel, theta, flag in res.records:
        if ids.size == 0 or ids[0] != 0:
            continue
        th = float(theta[0])
        samples.append(TrajectorySample(
            t=float(t_k), z_p=zi[0].copy(), z_e=ze_k.copy(), phase=PHASES[ph[0]],
            velocity=vel[0].copy(), theta_sharp=None if np.isnan(th) else th,
            amc=bool(flag[0])))

    t_s = float(res.switch_time[0])
    zp_s = res.switch_zp[0]
    ze_s = res.switch_ze[0]
    sep_s = float(res.switch_sep[0])
    q = capture_time_from_separation(sep_s, cfg)
    t_2 = t_s + q
    gp, ge = cfg.speeds.chase_speed_p, cfg.speeds.chase_speed_e
    if sep_s > 1e-12:
        direction = (ze_s - zp_s) / sep_s
    else:
        direction = np.zeros(2)
    v_chase = gp * direction

    t_c = t_s
    while t_c < t_2 - 1e-12:
        dt_c = t_c - t_s
        samples.append(TrajectorySample(
            t=t_c, z_p=zp_s + gp * dt_c * direction, z_e=ze_s + ge * dt_c * direction,
            phase="chase", velocity=v_chase.copy(), theta_sharp=None, amc=False))
        t_c += solution.grid.dt
    samples.append(TrajectorySample(
        t=t_2, z_p=zp_s + gp * q * direction, z_e=ze_s + ge * q * direction,
        phase="chase", velocity=v_chase.copy(), theta_sharp=None, amc=False))

    den = int(res.amc_den[0])
    frac = int(res.amc_num[0]) / den if den > 0 else None
    if not any(s.phase == "stalk" for s in samples):
        frac = None
    return Trajectory(samples=samples, switch_time=t_s, capture_time=t_2,
                      stalk_energy=float(res.stalk_energy[0]),
                      chase_energy=float(chase_energy_from_separation(sep_s, cfg)),
                      amc_fraction=frac)


def trajectory_to_csv(traj: Trajectory, path) -> str:
    """Write one row per sample; theta_sharp is blank outside the stalk phase."""
    fv = format_value
    lines = [TRAJECTORY_CSV_HEADER]
    for s in traj.samples:
        theta = "" if s.theta_sharp is None else fv(s.theta_sharp)
        lines.append(",".join([
            fv(s.t), fv(s.z_p[0]), fv(s.z_p[1]), fv(s.z_e[0]), fv(s.z_e[1]),
            s.phase, fv(s.velocity[0]), fv(s.velocity[1]), theta, str(int(s.amc)),
        ]))
    text = "\n".join(lines) + "\n"
    atomic_write_bytes(path, text.encode())
    return text
