"""Stationary solver checks against the zero-hazard closed form and structure."""

import numpy as np
import pytest

from camopursuit import build_grid, solve_stationary
from camopursuit.chase import chase_energy_from_separation
from camopursuit.grid import interp2

from conftest import make_config, merged


def closed_form_zero_hazard(r, cfg):
    # straight stalk to the trigger circle, then the lunge cost from there
    s, d = cfg.speeds, cfg.distances
    stalk_rate = s.idle_power + 0.5 * s.stalk_speed_cap ** 2
    lunge = chase_energy_from_separation(d.chase_trigger, cfg)
    return np.maximum(r - d.chase_trigger, 0.0) / s.stalk_speed_cap * stalk_rate + lunge


@pytest.fixture(scope="module")
def zero_hazard_solution():
    cfg = make_config(rate={"overall_strength": 0.0}, grid={"cells": 100, "time_cells": 400})
    grid = build_grid(cfg)
    return cfg, grid, solve_stationary(cfg, grid)


def fat_trigger_config(**over):
    # loose geometry so coarse test grids still resolve the trigger ball
    base = {
        "distances": {"visual_range": 0.75, "tracking_distance": 0.15,
                      "chase_trigger": 0.12, "capture_radius": 0.06},
        "rate": {"overall_strength": 5.0},
        "grid": {"cells": 50, "time_cells": 200},
    }
    return make_config(**merged(base, over))


def radii(cfg, grid):
    return np.linalg.norm(grid.points() - cfg.path.arrival_point, axis=-1)


def test_zero_hazard_matches_closed_form(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    assert sol.converged
    r = radii(cfg, grid)
    band = (r >= 0.12) & (r <= 0.6)
    expect = closed_form_zero_hazard(r[band], cfg)
    rel = np.abs(sol.values[band] - expect) / expect
    assert rel.max() <= 0.10


def test_zero_hazard_spot_value(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    za = cfg.path.arrival_point
    z = za + np.array([0.45, 0.0])
    got = interp2(sol.values, grid, z)
    assert got == pytest.approx(1.6075, rel=0.05)


def test_trigger_nodes_hold_chase_cost(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    r = radii(cfg, grid)
    t = sol.trigger_mask
    assert t.sum() > 0
    np.testing.assert_allclose(sol.values[t], chase_energy_from_separation(r[t], cfg), rtol=1e-12)


def test_outside_disk_is_infinite(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    assert np.isinf(sol.values[~sol.domain_mask]).all()
    assert np.isfinite(sol.values[sol.domain_mask]).all()


def test_huge_hazard_collapses_to_immediate_bolt():
    cfg = fat_trigger_config(rate={"overall_strength": 1e9})
    grid = build_grid(cfg)
    sol = solve_stationary(cfg, grid)
    r = radii(cfg, grid)
    m = sol.domain_mask
    s, d = cfg.speeds, cfg.distances
    drate = (s.idle_power + 0.5 * s.chase_speed_p ** 2) / (s.chase_speed_p - s.chase_speed_e)
    delta = np.maximum(r - d.capture_radius, 0.0) * drate
    assert (sol.values[m] <= delta[m] + 1e-9).all()
    # one-step drift bound, away from the rim where stencil vertices pull inward
    inner = m & (r <= d.visual_range - 1.5 * grid.dx)
    slack = drate * np.sqrt(2.0) * grid.dx
    assert (sol.values[inner] >= delta[inner] - slack - 1e-9).all()


@pytest.mark.filterwarnings("ignore:stationary solve hit the cycle cap")
def test_more_cycles_never_increase_values():
    cfg = fat_trigger_config()
    grid = build_grid(cfg)
    w1 = solve_stationary(cfg, grid, max_cycles=1).values
    w3 = solve_stationary(cfg, grid, max_cycles=3).values
    finite = np.isfinite(w1)
    assert (w3[finite] <= w1[finite] + 1e-12).all()
    # and nothing that was reachable becomes unreachable
    assert np.isfinite(w3[finite]).all()


def test_sweep_order_invariance():
    cfg = fat_trigger_config()
    grid = build_grid(cfg)
    a = solve_stationary(cfg, grid, tol=1e-12)
    b = solve_stationary(cfg, grid, tol=1e-12, orderings=((1, -1), (-1, -1), (-1, 1), (1, 1)))
    fa = np.isfinite(a.values)
    assert (fa == np.isfinite(b.values)).all()
    assert np.abs(a.values[fa] - b.values[fa]).max() <= 1e-9


def test_jacobi_reaches_same_fixed_point():
    cfg = fat_trigger_config()
    grid = build_grid(cfg)
    gs = solve_stationary(cfg, grid, tol=1e-10)
    ja = solve_stationary(cfg, grid, tol=1e-10, mode="jacobi", max_cycles=20000)
    assert ja.converged
    f = np.isfinite(gs.values)
    assert np.abs(gs.values[f] - ja.values[f]).max() <= 1e-6


def test_unknown_mode_rejected():
    cfg = fat_trigger_config()
    with pytest.raises(ValueError):
        solve_stationary(cfg, build_grid(cfg), mode="chaotic")


def test_policy_speed_and_direction(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    r = radii(cfg, grid)
    m = sol.domain_mask & ~sol.trigger_mask
    speed = np.linalg.norm(sol.policy[m], axis=-1)
    np.testing.assert_allclose(speed, cfg.speeds.stalk_speed_cap, rtol=1e-9)
    # with no hazard the optimal stalk heads inward everywhere
    band = m & (r >= 0.1)
    inward = cfg.path.arrival_point - grid.points()
    dots = (sol.policy * inward).sum(axis=-1)
    assert (dots[band] > 0).all()


def test_trigger_policy_points_at_evader(zero_hazard_solution):
    cfg, grid, sol = zero_hazard_solution
    t = sol.trigger_mask
    inward = cfg.path.arrival_point - grid.points()
    norms = np.linalg.norm(inward[t], axis=-1)
    expect = inward[t] / norms[:, None] * cfg.speeds.stalk_speed_cap
    np.testing.assert_allclose(sol.policy[t], expect, atol=1e-9)


def test_unresolved_trigger_ball_raises():
    # arrival parked at a cell center, dx/sqrt(2) ~ 0.08 from every node,
    # so no node lands inside the 0.05 trigger ball
    dx = 4.0 / 35
    tip = [17.5 * dx, 18.5 * dx]
    cfg = make_config(
        rate={"overall_strength": 0.0},
        grid={"cells": 35, "time_cells": 100},
        path={"kind": "samples", "samples": [[0.0, tip[0], tip[1] - 0.1], [2.0, tip[0], tip[1]]]},
    )
    with pytest.raises(ValueError, match="coarse"):
        solve_stationary(cfg, build_grid(cfg))


def test_hazard_raises_stalking_cost():
    # a bolt forces a chase at a higher energy-per-meter than patient stalking,
    # so a jumpier evader can only raise the post-arrival value
    quiet = fat_trigger_config(rate={"overall_strength": 0.0})
    loud = fat_trigger_config(rate={"overall_strength": 20.0})
    grid = build_grid(quiet)
    wq = solve_stationary(quiet, grid).values
    wl = solve_stationary(loud, grid).values
    f = np.isfinite(wq)
    assert (wl[f] >= wq[f] - 1e-7).all()
    assert (wl[f] - wq[f]).max() > 0.01
