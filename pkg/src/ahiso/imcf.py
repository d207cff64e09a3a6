"""Inverse mean curvature flow of centered spheres and the volume bounds built on it.

Centered spheres move by IMCF as coordinate spheres with area ``A0 e^t``, so the
flow is explicit and all quantities come from :mod:`ahiso.quantities`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolated, InsufficientData, IntegrandNonpositive, InvalidParameter, OutOfDomain
from .metric import RadialMetric
from .numerics import DEFAULT_TOL, Tolerances, integrate, integrate_to_infinity
from .quantities import SIXTEEN_PI, ball_volume, sphere_geometry

GEROCH_TOL = 1e-8
FLOW_COLUMNS = ("t", "area", "s", "mean_curvature", "hawking_mass", "swept_volume", "lower_bound")


@dataclass(frozen=True)
class FlowSample:
    t: float
    area: float
    s: float
    mean_curvature: float
    hawking_mass: float
    swept_volume: float
    lower_bound: float

    def row(self):
        return tuple(getattr(self, c) for c in FLOW_COLUMNS)


def _bracket(t, area0, mass):
    return 4.0 * math.exp(t) * area0 + SIXTEEN_PI - math.exp(-0.5 * t) * SIXTEEN_PI**1.5 * mass / math.sqrt(area0)


def _check_bracket(area0, mass, tau):
    # the bracket is increasing in t for mass >= 0, so its minimum sits at an endpoint
    ends = (0.0, tau) if mass >= 0 else tuple(np.linspace(0.0, tau, 257))
    for t in ends:
        if not _bracket(t, area0, mass) > 0:
            raise IntegrandNonpositive(
                f"swept-volume integrand is not positive at t = {t} (area0 = {area0}, m = {mass})")


def _lower_bound_integrand(area0, mass):
    a32 = area0**1.5
    return lambda t: math.exp(1.5 * t) * a32 / math.sqrt(_bracket(t, area0, mass))


def swept_volume_lower_bound(area0: float, m: float, tau: float, tol: Tolerances | None = None) -> float:
    """Lower bound for the volume swept by IMCF from an area-A0 surface of Hawking mass >= m."""
    if not area0 > 0:
        raise InvalidParameter(f"area0 must be positive, got {area0}")
    if tau < 0:
        raise InvalidParameter(f"tau must be non-negative, got {tau}")
    if tau == 0:
        return 0.0
    _check_bracket(area0, m, tau)
    return integrate(_lower_bound_integrand(area0, m), 0.0, tau, tol or DEFAULT_TOL).value


def flow_spheres(metric: RadialMetric, area0: float, t_max: float, n: int,
                 tol: Tolerances | None = None) -> list[FlowSample]:
    """Sample the sphere flow from area0 at n+1 uniform times in [0, t_max].

    ``lower_bound`` uses the Hawking mass of the initial sphere.
    """
    if not t_max > 0:
        raise InvalidParameter(f"t_max must be positive, got {t_max}")
    if n < 2:
        raise InvalidParameter(f"need n >= 2 steps, got {n}")
    if area0 < metric.horizon_area * (1 - 1e-14) or not area0 > 0:
        raise OutOfDomain(f"area0 = {area0} is below the horizon area {metric.horizon_area}")
    tol = tol or DEFAULT_TOL
    ts = np.linspace(0.0, t_max, n + 1)
    s0 = max(math.sqrt(area0 / (4.0 * math.pi)), metric.horizon_radius)
    vol0 = ball_volume(metric, s0, tol)
    m0 = sphere_geometry(metric, s0).hawking_mass
    _check_bracket(area0, m0, t_max)
    integrand = _lower_bound_integrand(area0, m0)

    samples = []
    bound = 0.0
    for k, t in enumerate(ts):
        t = float(t)
        area = area0 * math.exp(t)
        s = s0 if k == 0 else math.sqrt(area / (4.0 * math.pi))
        geom = sphere_geometry(metric, s)
        swept = 0.0 if k == 0 else ball_volume(metric, s, tol) - vol0
        if k:
            bound += integrate(integrand, float(ts[k - 1]), t, tol).value
        samples.append(FlowSample(t, area, s, geom.mean_curvature, geom.hawking_mass, swept, bound))
    return samples


def geroch_audit(samples, tol: float = GEROCH_TOL):
    """(min_increment, monotone) of the Hawking mass along consecutive samples."""
    if len(samples) < 2:
        raise InsufficientData("geroch_audit needs at least two samples")
    masses = np.array([smp.hawking_mass for smp in samples])
    min_increment = float(np.min(np.diff(masses)))
    return min_increment, min_increment >= -tol


def jump_growth_bound(area_omega: float, area_jump: float, T: float) -> float:
    """Upper bound on the flow-time gained across a jump: log(1 + (A_J/A) e^-T)."""
    if area_omega < 1:
        raise HypothesisViolated(f"area_omega = {area_omega} must be at least 1")
    if area_jump < 0 or T < 0:
        raise InvalidParameter("area_jump and T must be non-negative")
    return math.log1p(area_jump / area_omega * math.exp(-T))


def jump_volume_excess(area_jump: float) -> float:
    """Bound on the extra volume swept during one jump."""
    if area_jump < 0:
        raise InvalidParameter("area_jump must be non-negative")
    return 0.5 * area_jump


def jump_interval_integral(area: float, T: float, beta: float, tol: Tolerances | None = None) -> float:
    """Swept-volume integral over the jump interval [T, T + beta] at zero mass."""

    def integrand(t):
        return math.exp(1.5 * t) * area**1.5 / math.sqrt(
            4.0 * math.exp(t) * area + SIXTEEN_PI * (1.0 - math.exp(-0.5 * t)))

    return integrate(integrand, T, T + beta, tol or DEFAULT_TOL).value


def coarse_error_integral(area: float, tol: Tolerances | None = None) -> float:
    """int_0^inf e^{3t/2} A^{3/2} [(4 e^t A + 16 pi)^-1/2 - (4 e^t A + 16 pi (1 + e^{-t/2}/3))^-1/2] dt.

    Evaluated in the equivalent form (2 pi / 3) int e^{-t/2} / D dt with
    ``D = sqrt(1+x1) sqrt(1+x2) (sqrt(1+x1) + sqrt(1+x2))``, ``x1 = 4 pi e^-t / A`` and
    ``x2 = x1 (1 + e^{-t/2}/3)``, which has no overflow or cancellation.
    The value never exceeds 2 pi / 3.
    """
    if not area > 0:
        raise InvalidParameter(f"area must be positive, got {area}")

    def integrand(t):
        e = np.exp(-0.5 * t)
        x1 = 4.0 * np.pi * e * e / area
        x2 = x1 * (1.0 + e / 3.0)
        q1, q2 = np.sqrt(1.0 + x1), np.sqrt(1.0 + x2)
        return e / (q1 * q2 * (q1 + q2))

    return 2.0 * math.pi / 3.0 * integrate_to_infinity(integrand, 0.0, tol or DEFAULT_TOL,
                                                       vectorized=True).value


def coarse_error_integrand_raw(area: float, t: float) -> float:
    """The unsimplified integrand, for cross-checks on a finite t range."""
    a = area
    return math.exp(1.5 * t) * a**1.5 * (
        (4.0 * math.exp(t) * a + SIXTEEN_PI) ** -0.5
        - (4.0 * math.exp(t) * a + SIXTEEN_PI * (1.0 + math.exp(-0.5 * t) / 3.0)) ** -0.5)
