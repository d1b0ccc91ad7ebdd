"""Stochastic rollout oracle: Monte Carlo realizations of the solved pursuit.

Escape events come from thinning a homogeneous Poisson stream at the global
rate bound A; a proposal at time s is accepted with probability
lambda(z(s), s) / A, with the rate read at the covering step's start sample.
The realized hazard is therefore piecewise constant at step granularity,
matching the solver's left-endpoint survival quadrature.

Registration convention: an accepted escape in step [t_k, t_{k+1}) charges the
full step energy and launches the chase from the end-of-step state, exactly as
the backward recursion prices its escape branch. Escapes drawn inside the step
that crosses the trigger ball are overtaken by the switch, which the solve
treats as deterministic. The pre-switch path is the deterministic trace, so a
batch of rollouts from one start shares a single policy walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import copysign, inf

import numpy as np

from .chase import chase_energy_from_separation
from .config import PursuitConfig
from .escape import escape_rate
from .grid import format_value, interp2_or_inf
from .ioutil import atomic_write_bytes
from .timedep import TimeDependentSolution
from .tracer import _HOVER, _TRACK, Trajectory, _advance, _raise_for_status

_SIM_STREAM = 202

ROLLOUT_CSV_HEADER = "seed_index,escape_time,total_cost"


@dataclass
class RolloutResult:
    """One realized pursuit: the evader bolted first or the trigger fired.

    stalk_energy covers every pre-switch joule, idle hovering and full-speed
    tracking included; chase_energy is the line-of-centers cost from the
    switch state; total_cost is their sum. escape_time, when present, sits on
    the step lattice per the registration convention above.
    """

    escape_time: float | None
    switch_position: np.ndarray
    stalk_energy: float
    chase_energy: float
    total_cost: float


def _thin(times, rates, horizon, bound, rng) -> float | None:
    """First accepted proposal before the horizon, or None.

    times are step-start stamps, rates the matching hazard samples; a proposal
    is covered by the last sample at or before it.
    """
    if bound <= 0.0 or times.size == 0:
        return None
    t = float(times[0])
    while True:
        t += rng.exponential(1.0 / bound)
        if t >= horizon:
            return None
        k = int(np.searchsorted(times, t, side="right")) - 1
        if rng.random() < rates[k] / bound:
            return t


def sample_escape(traj: Trajectory, cfg: PursuitConfig, seed) -> float | None:
    """Escape time along the pre-chase portion of a trajectory, or None.

    The window runs from the first sample to the switch; after the switch the
    evader is already fleeing and the hazard no longer applies. seed is
    anything numpy's default_rng accepts.
    """
    pre = [s for s in traj.samples if s.phase != "chase"]
    if not pre:
        return None
    times = np.array([s.t for s in pre])
    pts = np.array([s.z_p for s in pre])
    rates = escape_rate(pts, times, cfg)
    rng = np.random.default_rng(seed)
    return _thin(times, rates, traj.switch_time, cfg.rate.overall_strength, rng)


@dataclass
class _PathTable:
    """Deterministic pre-switch walk with everything a rollout resolves against."""

    times: np.ndarray      # step-start stamps
    zs: np.ndarray         # pursuer at each step start
    lams: np.ndarray       # hazard at each step start
    deltas: np.ndarray     # chase cost if the evader bolts at that stamp
    cum: np.ndarray        # pre-switch energy accumulated before each stamp
    pursuit_total: float   # energy of the full walk, partial final step included
    switch_time: float
    switch_zp: np.ndarray
    delta_switch: float    # chase cost from the trigger switch


def _path_table(z0, solution: TimeDependentSolution, cfg: PursuitConfig) -> _PathTable:
    z0 = np.asarray(z0, dtype=float)
    res = _advance(z0[None, :], solution, cfg, record=True)
    _raise_for_status(int(res.status[0]), z0)

    idle = cfg.speeds.idle_power
    k_track = idle + 0.5 * cfg.speeds.stalk_speed_cap ** 2
    rows = [(t_k, zi[0], ze_k, int(ph[0]), vel[0]) for t_k, ids, zi, ze_k, ph, vel, _, _ in res.records]
    if rows:
        times = np.array([r[0] for r in rows])
        zs = np.array([r[1] for r in rows])
        zes = np.array([r[2] for r in rows])
        vels = np.array([r[4] for r in rows])
        phs = np.array([r[3] for r in rows])
        erate = np.where(phs == _HOVER, idle,
                         np.where(phs == _TRACK, k_track,
                                  idle + 0.5 * (vels ** 2).sum(axis=1)))
        lams = escape_rate(zs, times, cfg)
        deltas = chase_energy_from_separation(np.linalg.norm(zs - zes, axis=1), cfg)
        dt = solution.grid.dt
        cum = np.concatenate([[0.0], np.cumsum(erate * dt)[:-1]])
    else:
        times = zs = lams = deltas = cum = np.empty(0)
    return _PathTable(
        times=times, zs=zs, lams=np.asarray(lams), deltas=np.asarray(deltas), cum=cum,
        pursuit_total=float(res.pursuit_cost[0]),
        switch_time=float(res.switch_time[0]),
        switch_zp=res.switch_zp[0],
        delta_switch=float(chase_energy_from_separation(float(res.switch_sep[0]), cfg)))


def _resolve(table: _PathTable, t_esc: float | None) -> RolloutResult:
    if t_esc is not None:
        r = int(np.searchsorted(table.times, t_esc, side="right"))
        if r < table.times.size:
            return RolloutResult(
                escape_time=float(table.times[r]),
                switch_position=table.zs[r].copy(),
                stalk_energy=float(table.cum[r]),
                chase_energy=float(table.deltas[r]),
                total_cost=float(table.cum[r] + table.deltas[r]))
    return RolloutResult(
        escape_time=None,
        switch_position=np.array(table.switch_zp, dtype=float),
        stalk_energy=table.pursuit_total,
        chase_energy=table.delta_switch,
        total_cost=table.pursuit_total + table.delta_switch)


def rollout(z0, solution: TimeDependentSolution, cfg: PursuitConfig,
            seed: int, index: int = 0) -> RolloutResult:
    """One stochastic pursuit realization from z0 under the traced policy.

    index selects the rollout substream, so batch position i reproduces
    rollout(..., seed, index=i) bit for bit.
    """
    table = _path_table(z0, solution, cfg)
    t_esc = _sample_on_table(table, cfg, seed, index)
    return _resolve(table, t_esc)


def _sample_on_table(table: _PathTable, cfg: PursuitConfig, seed: int, index: int):
    rng = np.random.default_rng((int(seed), _SIM_STREAM, int(index)))
    return _thin(table.times, table.lams, table.switch_time,
                 cfg.rate.overall_strength, rng)


def batch_rollouts(z0, solution: TimeDependentSolution, cfg: PursuitConfig,
                   n: int, seed: int) -> list[RolloutResult]:
    """n independent rollouts from one start, sharing the deterministic walk."""
    table = _path_table(z0, solution, cfg)
    return [_resolve(table, _sample_on_table(table, cfg, seed, i)) for i in range(n)]


def estimate_expected_cost(z0, solution: TimeDependentSolution, cfg: PursuitConfig,
                           n: int, seed: int) -> tuple[float, float]:
    """Sample mean and standard error of the rollout cost; fixed reduction order."""
    if n < 2:
        raise ValueError("expected-cost estimation needs n >= 2 rollouts")
    totals = np.array([r.total_cost for r in batch_rollouts(z0, solution, cfg, n, seed)])
    if np.all(totals == totals[0]):
        return float(totals[0]), 0.0
    return float(totals.mean()), float(totals.std(ddof=1) / np.sqrt(n))


def validation_report(z0, solution: TimeDependentSolution, cfg: PursuitConfig,
                      n: int, seed: int) -> dict:
    """Monte Carlo check of the solved value at one start, as a plain dict."""
    z0 = np.asarray(z0, dtype=float)
    mean, stderr = estimate_expected_cost(z0, solution, cfg, n, seed)
    u0 = float(interp2_or_inf(solution.values[0], solution.grid, z0[None, :])[0])
    if stderr > 0.0:
        z_score = (mean - u0) / stderr
    else:
        z_score = 0.0 if mean == u0 else copysign(inf, mean - u0)
    return {"point": [float(z0[0]), float(z0[1])], "n": int(n), "mean": mean,
            "stderr": stderr, "u0": u0, "z_score": z_score}


def rollouts_to_csv(results, path) -> str:
    """One row per rollout; escape_time is blank when the trigger fired first."""
    lines = [ROLLOUT_CSV_HEADER]
    for i, r in enumerate(results):
        esc = "" if r.escape_time is None else format_value(r.escape_time)
        lines.append(f"{i},{esc},{format_value(r.total_cost)}")
    text = "\n".join(lines) + "\n"
    atomic_write_bytes(path, text.encode())
    return text
