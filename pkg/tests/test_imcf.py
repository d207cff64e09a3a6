import math

import numpy as np
import pytest

from ahiso.errors import HypothesisViolated, InsufficientData, IntegrandNonpositive, OutOfDomain
from ahiso.imcf import (
    FlowSample,
    coarse_error_integral,
    coarse_error_integrand_raw,
    flow_spheres,
    geroch_audit,
    jump_growth_bound,
    jump_interval_integral,
    jump_volume_excess,
    swept_volume_lower_bound,
)
from ahiso.metric import make_hyperbolic, make_schwarzschild_ads
from ahiso.numerics import Tolerances, integrate
from ahiso.quantities import hyperbolic_ball_volume_exact

SCHW1 = make_schwarzschild_ads(1.0)

# regression bound, frozen from the closed-form ceiling of the rewritten integrand
COARSE_ERROR_BOUND = 2 * math.pi / 3


class TestFlowSpheres:
    def test_schwarzschild_constant_mass(self):
        for smp in flow_spheres(SCHW1, 16 * math.pi, 3.0, 30):
            assert smp.hawking_mass == pytest.approx(1.0, abs=1e-10)

    def test_initial_sample(self):
        first = flow_spheres(SCHW1, 20 * math.pi, 1.0, 4)[0]
        assert first.t == 0 and first.swept_volume == 0 and first.area == 20 * math.pi

    def test_area_law(self):
        samples = flow_spheres(SCHW1, 16 * math.pi, 2.0, 10)
        for smp in samples:
            assert smp.area / samples[0].area == pytest.approx(math.exp(smp.t), rel=1e-15)

    def test_swept_nondecreasing(self, ramp_metrics):
        m = ramp_metrics[0]
        samples = flow_spheres(m, m.horizon_area, 4.0, 40)
        assert np.all(np.diff([s.swept_volume for s in samples]) > 0)

    def test_ramp_monotone(self, ramp_metrics):
        for m in ramp_metrics[:3]:
            min_inc, ok = geroch_audit(flow_spheres(m, m.horizon_area, 4.0, 60))
            assert ok, min_inc

    def test_below_horizon(self):
        with pytest.raises(OutOfDomain):
            flow_spheres(SCHW1, 10.0, 1.0, 4)


class TestLowerBound:
    def test_mass_zero_is_hyperbolic_shell(self):
        a, tau = 10.0, 2.0
        shell = hyperbolic_ball_volume_exact(math.exp(tau) * a) - hyperbolic_ball_volume_exact(a)
        assert swept_volume_lower_bound(a, 0.0, tau) == pytest.approx(shell, abs=1e-8)

    def test_zero_time(self):
        assert swept_volume_lower_bound(16 * math.pi, 1.0, 0.0) == 0.0

    def test_equality_on_schwarzschild(self):
        samples = flow_spheres(SCHW1, 16 * math.pi, 2.0, 8)
        assert samples[-1].swept_volume == pytest.approx(swept_volume_lower_bound(16 * math.pi, 1.0, 2.0), rel=1e-7)

    def test_strict_on_perturbation(self, ramp_metrics):
        m = ramp_metrics[0]
        samples = flow_spheres(m, m.horizon_area, 3.0, 30)
        m_low = min(s.hawking_mass for s in samples)
        for smp in samples[1:]:
            assert smp.swept_volume >= swept_volume_lower_bound(m.horizon_area, m_low, smp.t) - 1e-7

    def test_nonpositive_integrand(self):
        with pytest.raises(IntegrandNonpositive):
            swept_volume_lower_bound(1.0, 100.0, 1.0)


class TestGerochAudit:
    def _sample(self, t, mass):
        return FlowSample(t, 1.0, 1.0, 2.0, mass, 0.0, 0.0)

    def test_constant_pair(self):
        assert geroch_audit([self._sample(0, 1.0), self._sample(1, 1.0)]) == (0.0, True)

    def test_decrease_detected(self):
        min_inc, ok = geroch_audit([self._sample(0, 1.0), self._sample(1, 0.9), self._sample(2, 1.2)])
        assert min_inc == pytest.approx(-0.1) and not ok

    def test_insufficient(self):
        with pytest.raises(InsufficientData):
            geroch_audit([self._sample(0, 1.0)])

    def test_counterexample_decreases(self, counterexample_metric):
        m = counterexample_metric
        min_inc, ok = geroch_audit(flow_spheres(m, m.horizon_area, 28.0, 200))
        assert not ok and min_inc < 0


class TestJumps:
    def test_no_jump(self):
        assert jump_growth_bound(5.0, 0.0, 1.0) == 0.0

    def test_equal_areas(self):
        assert jump_growth_bound(3.0, 3.0, 0.0) == pytest.approx(math.log(2))

    def test_monotone_in_parameters(self):
        ts = [0.0, 0.5, 1, 4, 20]
        assert np.all(np.diff([jump_growth_bound(2.0, 1.0, t) for t in ts]) < 0)
        assert np.all(np.diff([jump_growth_bound(a, 1.0, 0.5) for a in [1, 2, 10]]) < 0)
        assert np.all(np.diff([jump_growth_bound(2.0, j, 0.5) for j in [0.1, 1, 10]]) > 0)

    def test_small_omega(self):
        with pytest.raises(HypothesisViolated):
            jump_growth_bound(0.5, 1.0, 0.0)

    def test_volume_excess(self):
        assert jump_volume_excess(16 * math.pi) == pytest.approx(8 * math.pi)
        assert jump_volume_excess(0.0) == 0.0

    @pytest.mark.parametrize("area", [1e2, 1e4])
    @pytest.mark.parametrize("T", [0.0, 1.0])
    def test_jump_integral_bounded(self, area, T):
        beta = jump_growth_bound(area, area, T)
        assert jump_interval_integral(area, T, beta) <= jump_volume_excess(area) + 1e-8


class TestCoarseError:
    @pytest.mark.parametrize("area", [1e-3, 1.0, 1e2, 1e4, 1e6, 1e8])
    def test_positive_and_bounded(self, area):
        assert 0 < coarse_error_integral(area) <= COARSE_ERROR_BOUND

    def test_small_area_decays(self):
        assert coarse_error_integral(1e-3) < coarse_error_integral(1.0) / 10
        assert coarse_error_integral(1e-8) < 1e-3

    @pytest.mark.parametrize("area", [1.0, 10.0, 100.0])
    def test_matches_raw_integrand(self, area):
        tol = Tolerances(1e-9, 1e-7)
        raw = integrate(lambda t: coarse_error_integrand_raw(area, t), 0.0, 12.0, tol).value
        full = coarse_error_integral(area)
        # the truncated tail beyond t = 12 is below (2 pi / 3) * 2 e^-6 / 2
        assert raw <= full
        assert full - raw < 2 * math.pi / 3 * math.exp(-6) * 1.01

    def test_approaches_ceiling(self):
        assert coarse_error_integral(1e12) == pytest.approx(COARSE_ERROR_BOUND, rel=1e-5)


def test_hyperbolic_flow_matches_closed_form():
    samples = flow_spheres(make_hyperbolic(), 4 * math.pi, 2.0, 4)
    for smp in samples:
        shell = hyperbolic_ball_volume_exact(smp.area) - hyperbolic_ball_volume_exact(4 * math.pi)
        assert smp.swept_volume == pytest.approx(shell, abs=1e-9)
        assert smp.lower_bound == pytest.approx(shell, abs=1e-8)
