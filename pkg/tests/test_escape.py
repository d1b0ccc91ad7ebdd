import numpy as np
import pytest

from camopursuit import EvaderPath, PursuitConfig, RateParams, SampledRoute
from camopursuit.escape import (
    DegenerateGeometryError,
    angular_displacement,
    escape_rate,
    survival_probability,
)
from conftest import make_config


def static_config(strength=1.0, acuity=0.05, tolerance=0.4, focal=(0.5, 0.0)):
    """Evader pinned near the origin, landmark on the +x axis; skips validation."""
    route = SampledRoute([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [4.0, 0.0, 1e-9]])
    return PursuitConfig(
        rate=RateParams(acuity=acuity, tolerance=tolerance, overall_strength=strength),
        path=EvaderPath(route=route, focal_point=np.array(focal)),
    )


class TestAngularDisplacement:
    def test_on_axis_is_zero(self):
        assert angular_displacement([0.3, 0.0], 0.0, static_config()) == pytest.approx(0.0)

    def test_perpendicular(self):
        theta = angular_displacement([0.0, 0.4], 0.0, static_config())
        assert theta == pytest.approx(np.pi / 2, abs=1e-12)

    def test_opposite(self):
        theta = angular_displacement([-0.2, 0.0], 0.0, static_config())
        assert theta == pytest.approx(np.pi, abs=1e-12)

    def test_degenerate_raises(self):
        with pytest.raises(DegenerateGeometryError):
            angular_displacement([0.0, 0.0], 0.0, static_config())
        with pytest.raises(DegenerateGeometryError):
            angular_displacement([0.3, 0.0], 0.0, static_config(focal=(0.0, 0.0)))

    def test_range_on_random_inputs(self):
        cfg = static_config()
        rng = np.random.default_rng(11)
        z = rng.uniform(-1.0, 1.0, size=(10_000, 2))
        z = z[np.linalg.norm(z, axis=1) > 1e-6]
        theta = angular_displacement(z, 0.0, cfg)
        assert np.all((theta >= 0.0) & (theta <= np.pi))


class TestEscapeRate:
    def test_trigger_disk_full_strength(self):
        cfg = static_config(strength=3.0)
        assert escape_rate([0.03, 0.0], 0.0, cfg) == pytest.approx(3.0)
        # boundary |r| = chase_trigger belongs to the full-strength disk
        assert escape_rate([0.05, 0.0], 0.0, cfg) == pytest.approx(3.0)

    def test_blind_spot_value(self):
        # on-axis at |r| = 0.3: exp(-0.4 * 0.25^2 / 0.05) = exp(-0.5)
        cfg = static_config(strength=1.0, acuity=0.05, tolerance=0.4)
        lam = escape_rate([0.3, 0.0], 0.0, cfg)
        assert lam == pytest.approx(0.6065306597126334, rel=0, abs=1e-12)

    def test_landmark_out_of_view_drops_angle_term(self):
        cfg = static_config(strength=1.0, focal=(2.0, 0.0))  # |r#| = 2 > 0.75
        lam = escape_rate([0.3, 0.0], 0.0, cfg)
        assert lam == pytest.approx(np.exp(-0.4 * 0.25 ** 2), rel=0, abs=1e-12)
        # same value regardless of direction: no blind spot without the landmark
        lam_side = escape_rate([0.0, 0.3], 0.0, cfg)
        assert lam_side == pytest.approx(lam, abs=1e-12)

    def test_outside_visual_range_is_zero(self):
        cfg = static_config()
        assert escape_rate([0.8, 0.0], 0.0, cfg) == 0.0
        assert escape_rate([0.0, 5.0], 0.0, cfg) == 0.0

    def test_continuous_at_trigger_boundary(self):
        cfg = static_config(strength=2.0)
        inner = escape_rate([0.05 - 1e-9, 0.0], 0.0, cfg)
        outer = escape_rate([0.05 + 1e-9, 0.0], 0.0, cfg)
        assert abs(inner - outer) < 1e-6

    def test_discontinuous_at_visual_range(self):
        cfg = static_config(strength=2.0)
        assert escape_rate([0.75, 0.0], 0.0, cfg) == pytest.approx(
            2.0 * np.exp(-0.4 * 0.7 ** 2 / 0.05), rel=1e-12
        )
        assert escape_rate([0.75 + 1e-9, 0.0], 0.0, cfg) == 0.0

    def test_tolerance_zero_collapses_to_strength(self):
        cfg = static_config(strength=2.5, tolerance=0.0)
        rng = np.random.default_rng(5)
        ang = rng.uniform(0, 2 * np.pi, 200)
        rad = rng.uniform(0.051, 0.75, 200)
        z = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        assert np.allclose(escape_rate(z, 0.0, cfg), 2.5)

    def test_bounds_on_random_inputs(self):
        cfg = make_config()  # full experiment geometry, strength 5
        rng = np.random.default_rng(17)
        z = rng.uniform(0.0, 4.0, size=(10_000, 2))
        t = rng.uniform(0.0, 2.0, size=10_000)
        lam = escape_rate(z, t, cfg)
        assert np.all(lam >= 0.0)
        assert np.all(lam <= 5.0 + 1e-12)
        dist = np.linalg.norm(z - cfg.path.position(t), axis=1)
        assert np.all(lam[dist > 0.75] == 0.0)
        assert np.all(lam[dist <= 0.05] == 5.0)

    def test_radially_nonincreasing_along_fixed_ray(self):
        cfg = static_config(strength=2.0)
        rng = np.random.default_rng(23)
        for _ in range(200):
            ang = rng.uniform(0, 2 * np.pi)
            radii = np.sort(rng.uniform(0.0501, 0.75, 50))
            z = np.column_stack([radii * np.cos(ang), radii * np.sin(ang)])
            lam = escape_rate(z, 0.0, cfg)
            assert np.all(np.diff(lam) <= 1e-12)

    def test_sharper_acuity_never_raises_rate(self):
        sharp = static_config(acuity=5e-5)
        soft = static_config(acuity=0.05)
        rng = np.random.default_rng(31)
        z = rng.uniform(-0.8, 0.8, size=(10_000, 2))
        assert np.all(escape_rate(z, 0.0, sharp) <= escape_rate(z, 0.0, soft) + 1e-12)

    def test_higher_tolerance_never_raises_rate(self):
        low = static_config(tolerance=0.4)
        high = static_config(tolerance=4.0)
        rng = np.random.default_rng(37)
        z = rng.uniform(-0.8, 0.8, size=(10_000, 2))
        assert np.all(escape_rate(z, 0.0, high) <= escape_rate(z, 0.0, low) + 1e-12)


class TestSurvival:
    def test_no_hazard(self):
        cfg = static_config(strength=0.0)
        pts = np.array([[0.3, 0.0], [0.31, 0.0], [0.32, 0.0]])
        assert survival_probability(pts, [0.0, 0.1, 0.2], cfg) == 1.0

    def test_constant_rate_closed_form(self):
        # tolerance 0 makes the rate exactly A within range; exp(-A * elapsed)
        cfg = static_config(strength=2.0, tolerance=0.0)
        times = np.linspace(0.0, 0.5, 11)
        pts = np.tile([0.3, 0.0], (11, 1))
        assert survival_probability(pts, times, cfg) == pytest.approx(np.exp(-1.0), abs=1e-12)

    def test_short_segments_trivial(self):
        cfg = static_config()
        assert survival_probability(np.empty((0, 2)), [], cfg) == 1.0
        assert survival_probability([[0.3, 0.0]], [0.0], cfg) == 1.0

    def test_concatenation_multiplies(self):
        cfg = make_config()
        rng = np.random.default_rng(41)
        times = np.sort(rng.uniform(0.0, 2.0, 41))
        pts = cfg.path.position(times) + rng.uniform(-0.5, 0.5, (41, 2))
        full = survival_probability(pts, times, cfg)
        split = survival_probability(pts[:21], times[:21], cfg) * survival_probability(
            pts[20:], times[20:], cfg
        )
        assert full == pytest.approx(split, rel=1e-12)

    def test_in_unit_interval(self):
        cfg = make_config()
        rng = np.random.default_rng(43)
        for _ in range(50):
            n = rng.integers(2, 30)
            times = np.sort(rng.uniform(0.0, 2.0, n))
            pts = rng.uniform(0.0, 4.0, (n, 2))
            p = survival_probability(pts, times, cfg)
            assert 0.0 < p <= 1.0
