import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahiso.errors import InvalidParameter, NoHorizon, OutOfDomain
from ahiso.metric import make_hyperbolic, make_schwarzschild_ads, scalar_curvature
from ahiso.numerics import integrate, solve_ode
from ahiso.quantities import (
    ball_volume,
    christodoulou_yau,
    hyperbolic_ball_volume_exact,
    penrose_margin,
    renormalized_volume,
    renormalized_volume_derivative,
    sphere_geometry,
    stable_cmc_H_bound,
)

SCHW1 = make_schwarzschild_ads(1.0)
HYP = make_hyperbolic()


class TestSphereGeometry:
    @pytest.mark.parametrize("mass", [0.5, 1.0, 2.0])
    def test_hawking_mass_exact(self, mass):
        m = make_schwarzschild_ads(mass)
        for s in np.geomspace(2 * mass * (1 + 1e-9), 1e3, 50):
            assert abs(sphere_geometry(m, s).hawking_mass - mass) <= 1e-10

    def test_hyperbolic_zero_mass(self):
        for s in [0.1, 1.0, 40.0]:
            assert abs(sphere_geometry(HYP, s).hawking_mass) < 1e-12

    def test_horizon(self):
        g = sphere_geometry(SCHW1, 2.0)
        assert g.mean_curvature == 2.0
        assert g.area == pytest.approx(16 * math.pi)
        assert g.traceless_sff_norm_sq == 0.0

    def test_inside_horizon(self):
        with pytest.raises(OutOfDomain):
            sphere_geometry(SCHW1, 1.5)


class TestBallVolume:
    def test_hyperbolic_unit(self):
        assert ball_volume(HYP, 1.0) == pytest.approx(2 * math.pi * (math.sqrt(2) - math.asinh(1)), rel=1e-13)

    def test_empty_at_horizon(self):
        assert ball_volume(SCHW1, 2.0) == 0.0

    def test_schwarzschild_ode_oracle(self):
        traj = solve_ode(lambda s, y: (4 * math.pi * s * s / math.sqrt(1 + s * s - 2 / s),), 2.0, [0.0], 10.0)
        assert ball_volume(SCHW1, 10.0) == pytest.approx(float(traj.final[0]), rel=1e-9)

    def test_derivative_is_area_over_lapse(self):
        for s in [2.5, 7.0, 40.0]:
            h = 1e-4 * s
            fd = (ball_volume(SCHW1, s + h) - ball_volume(SCHW1, s - h)) / (2 * h)
            assert fd == pytest.approx(4 * math.pi * s * s / math.sqrt(SCHW1.f(s)), rel=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(2.0, 200.0), st.floats(1e-3, 10.0))
    def test_monotone(self, s, ds):
        assert ball_volume(SCHW1, s + ds) > ball_volume(SCHW1, s)


class TestHyperbolicBallVolume:
    def test_unit_radius(self):
        assert hyperbolic_ball_volume_exact(4 * math.pi) == pytest.approx(
            2 * math.pi * (math.sqrt(2) - math.asinh(1)), rel=1e-14)

    def test_small_area_limit(self):
        # volume ~ (4/3) pi R^3 for small balls
        r = 1e-4
        assert hyperbolic_ball_volume_exact(4 * math.pi * r * r) == pytest.approx(4 / 3 * math.pi * r**3, rel=1e-7)

    def test_series_branch_matches_high_precision(self):
        mp.mp.dps = 40
        for r in [1e-3, 9.9e-3, 1.01e-2]:
            exact = 2 * mp.pi * (r * mp.sqrt(1 + mp.mpf(r) ** 2) - mp.asinh(r))
            assert hyperbolic_ball_volume_exact(4 * math.pi * r * r) == pytest.approx(float(exact), rel=1e-12)

    def test_matches_quadrature(self):
        s = math.sinh(2.0)
        assert hyperbolic_ball_volume_exact(4 * math.pi * s * s) == pytest.approx(ball_volume(HYP, s), abs=1e-10)

    def test_nonpositive(self):
        with pytest.raises(InvalidParameter):
            hyperbolic_ball_volume_exact(0.0)


class TestRenormalizedVolume:
    def test_hyperbolic_zero(self):
        assert abs(renormalized_volume(HYP)) < 1e-10

    def test_schwarzschild_negative(self):
        assert renormalized_volume(SCHW1) < 0

    def test_matches_truncated_difference(self):
        # direct difference of truncated volumes at a moderate cutoff, plus the tail estimate 4 pi m / S
        big = 2e3
        direct = ball_volume(SCHW1, big) - hyperbolic_ball_volume_exact(4 * math.pi * big * big)
        assert renormalized_volume(SCHW1) == pytest.approx(direct + 4 * math.pi / big, abs=1e-5)

    def test_derivative_integral(self):
        for mass in [0.3, 1.0, 2.5]:
            integral = integrate(renormalized_volume_derivative, 1e-300, mass).value
            assert renormalized_volume(make_schwarzschild_ads(mass)) == pytest.approx(integral, abs=1e-6)

    def test_derivative_finite_difference(self):
        h = 1e-4
        fd = (renormalized_volume(make_schwarzschild_ads(1 + h)) - renormalized_volume(make_schwarzschild_ads(1 - h))) / (2 * h)
        assert renormalized_volume_derivative(1.0) == pytest.approx(fd, rel=1e-5)

    def test_derivative_integral_term_positive(self):
        for mass in [0.1, 1.0, 5.0]:
            assert renormalized_volume_derivative(mass) + 16 * math.pi * mass > 0

    def test_derivative_needs_positive_mass(self):
        with pytest.raises(InvalidParameter):
            renormalized_volume_derivative(0.0)

    def test_monotonicity_in_mass(self):
        masses = np.linspace(0.1, 5.0, 12)
        vols = [renormalized_volume(make_schwarzschild_ads(m)) for m in masses]
        shifted = [v + 8 * math.pi * m * m for v, m in zip(vols, masses)]
        assert np.all(np.diff(vols) < 0)
        assert np.all(np.diff(shifted) > 0)


class TestPenroseMargin:
    def test_schwarzschild_positive(self):
        assert penrose_margin(SCHW1) > 0

    def test_small_mass_limit(self):
        # dV/dm -> 4 pi as m -> 0, so the margin vanishes linearly
        for mass in [1e-3, 1e-5]:
            assert penrose_margin(make_schwarzschild_ads(mass)) == pytest.approx(4 * math.pi * mass, rel=1e-2)
        assert 0 < penrose_margin(make_schwarzschild_ads(1e-7)) < 1e-5

    def test_no_horizon(self):
        with pytest.raises(NoHorizon):
            penrose_margin(HYP)

    def test_ramps_positive(self, ramp_metrics):
        for m in ramp_metrics:
            assert penrose_margin(m) > 1e-6

    def test_counterexample_negative(self, counterexample_metric):
        assert penrose_margin(counterexample_metric) < -1e-6


class TestChristodoulouYau:
    def test_schwarzschild_lhs_vanishes(self):
        lhs, rhs0, rhs1, _ = christodoulou_yau(SCHW1, 5.0)
        assert abs(lhs) < 1e-9
        assert rhs0 > 0 and rhs1 == pytest.approx(rhs0 + 8 * math.pi)

    def test_hyperbolic_unit_sphere(self):
        assert christodoulou_yau(HYP, 1.0)[3] == pytest.approx(16 * math.pi, rel=1e-13)

    def test_horizon_limit(self):
        for s in [2.0, 2.5, 10.0]:
            assert christodoulou_yau(SCHW1, s)[3] == pytest.approx(16 * math.pi * (1 - 2 / s), abs=1e-10)

    @pytest.mark.parametrize("mass", [0.0, 0.5, 2.0])
    def test_combined_bound(self, mass):
        m = HYP if mass == 0 else make_schwarzschild_ads(mass)
        for s in np.geomspace(max(2 * mass, 0.05), 500, 30):
            assert christodoulou_yau(m, s)[3] <= 64 * math.pi / 3 + 1e-8

    def test_lhs_tracks_scalar_curvature(self, ramp_metrics):
        m = ramp_metrics[0]
        s = 2.5
        assert christodoulou_yau(m, s)[0] == pytest.approx(4 * math.pi * s * s * (scalar_curvature(m, s) + 6))


class TestStableBound:
    def test_hyperbolic(self):
        s = 3.0
        assert stable_cmc_H_bound(HYP, s) == pytest.approx(64 * math.pi / (3 * 4 * math.pi * s * s) + 4)

    def test_schwarzschild_large(self):
        s = 500.0
        bound = stable_cmc_H_bound(SCHW1, s)
        h2 = sphere_geometry(SCHW1, s).mean_curvature ** 2
        assert bound == pytest.approx(4.0, abs=1e-4)
        assert h2 <= bound + 1e-6

    def test_horizon(self):
        assert 4.0 <= stable_cmc_H_bound(SCHW1, 2.0)
