"""Geometric functionals of centered coordinate spheres and balls."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, NoHorizon, OutOfDomain
from .metric import (
    H_PROFILE,
    RadialMetric,
    _check_s,
    h2_minus_4,
    make_schwarzschild_ads,
    mean_curvature,
    potential,
    ricci_normal,
    scalar_curvature,
)
from .numerics import DEFAULT_TOL, Tolerances, integrate, integrate_to_infinity

SIXTEEN_PI = 16.0 * math.pi


@dataclass(frozen=True)
class SphereGeom:
    s: float
    area: float
    mean_curvature: float
    hawking_mass: float
    scalar_curvature: float
    traceless_sff_norm_sq: float = 0.0


def hawking_mass_from(area: float, h2m4: float) -> float:
    """Hawking mass of a constant-H sphere from its area and H^2 - 4."""
    return math.sqrt(area) / SIXTEEN_PI**1.5 * (SIXTEEN_PI - area * h2m4)


def sphere_geometry(metric: RadialMetric, s: float) -> SphereGeom:
    area = 4.0 * math.pi * s * s
    return SphereGeom(
        s=s,
        area=area,
        mean_curvature=mean_curvature(metric, s),
        hawking_mass=hawking_mass_from(area, h2_minus_4(metric, s)),
        scalar_curvature=scalar_curvature(metric, s),
    )


def _volume_density(mass):
    if mass == 0:
        return lambda s: s * s / np.sqrt(1.0 + s * s)
    return lambda s: s * s / np.sqrt(potential(mass, s))


def ball_volume(metric: RadialMetric, s: float, tol: Tolerances | None = None) -> float:
    """Volume of {sigma <= s} outside the horizon."""
    _check_s(metric, s)
    tol = tol or DEFAULT_TOL
    if metric.kind == H_PROFILE:
        interior = metric._interior
        if s < metric.match_s:
            return float(interior.volume(interior.r_of_s(s)))
        start, base = metric.match_s, interior.volume_end
    else:
        start, base = metric.horizon_radius, 0.0
    if s <= start:
        return base
    density = _volume_density(metric.mass)
    return base + 4.0 * math.pi * integrate(density, start, s, tol, vectorized=True).value


def hyperbolic_ball_volume_exact(area: float) -> float:
    """Volume of the hyperbolic ball whose boundary has the given area."""
    if not area > 0:
        raise InvalidParameter(f"area must be positive, got {area}")
    big_r = math.sqrt(area / (4.0 * math.pi))
    if big_r < 1e-2:
        # R sqrt(1+R^2) - asinh R, expanded to avoid cancellation
        r2 = big_r * big_r
        core = big_r**3 * (2.0 / 3.0 - r2 * (1.0 / 5.0 - r2 * (3.0 / 28.0 - r2 * 5.0 / 72.0)))
        return 2.0 * math.pi * core
    return 2.0 * math.pi * (big_r * math.sqrt(1.0 + big_r * big_r) - math.asinh(big_r))


def density_difference(mass: float, s):
    """s^2 f^-1/2 - s^2 (1+s^2)^-1/2, rewritten without cancellation."""
    u = 1.0 + s * s
    fv = u - 2.0 * mass / s
    sf, su = np.sqrt(fv), np.sqrt(u)
    return 2.0 * mass * s / (sf * su * (sf + su))


def _tail_difference(mass, start, tol):
    """4 pi int_start^inf of the density difference."""
    if mass == 0:
        return 0.0
    return 4.0 * math.pi * integrate_to_infinity(
        lambda s: density_difference(mass, s), start, tol, vectorized=True).value


def _hyperbolic_head(s):
    """Hyperbolic volume inside area radius s."""
    if s <= 0:
        return 0.0
    return hyperbolic_ball_volume_exact(4.0 * math.pi * s * s)


def renormalized_volume(metric: RadialMetric, tol: Tolerances | None = None) -> float:
    """Limit of the volume of {s <= S} minus the hyperbolic ball volume at S."""
    tol = tol or DEFAULT_TOL
    key = ("renormalized_volume", tol)
    if key in metric._cache:
        return metric._cache[key]
    start = metric.match_s
    inner = metric._interior.volume_end if metric.kind == H_PROFILE else 0.0
    value = inner + _tail_difference(metric.mass, start, tol) - _hyperbolic_head(start)
    metric._cache[key] = value
    return value


def renormalized_volume_of_mass(mass: float, tol: Tolerances | None = None) -> float:
    if mass == 0:
        return 0.0
    return renormalized_volume(make_schwarzschild_ads(mass), tol)


def renormalized_volume_derivative(mass: float, tol: Tolerances | None = None) -> float:
    """dV/dm for Schwarzschild-AdS of mass m."""
    if not mass > 0:
        raise InvalidParameter(f"mass must be positive, got {mass}")
    tol = tol or DEFAULT_TOL
    integral = integrate_to_infinity(
        lambda s: s / potential(mass, s) ** 1.5, 2.0 * mass, tol, vectorized=True).value
    return -16.0 * math.pi * mass + 4.0 * math.pi * integral


def penrose_margin(metric: RadialMetric, tol: Tolerances | None = None) -> float:
    """V(M, g) + A_horizon / 2."""
    if not metric.has_horizon:
        raise NoHorizon("penrose_margin needs a metric with a horizon")
    return renormalized_volume(metric, tol) + 0.5 * metric.horizon_area


def christodoulou_yau(metric: RadialMetric, s: float):
    """(lhs, rhs_genus0, rhs_general, combined_lhs) for the coordinate sphere of radius s."""
    geom = sphere_geometry(metric, s)
    area = geom.area
    lhs = area * (geom.scalar_curvature + 6.0)
    rhs_genus0 = 1.5 * area**-0.5 * SIXTEEN_PI**1.5 * geom.hawking_mass
    rhs_general = rhs_genus0 + 8.0 * math.pi
    combined = 2.0 / 3.0 * lhs + area * h2_minus_4(metric, s)
    return lhs, rhs_genus0, rhs_general, combined


def stable_cmc_H_bound(metric: RadialMetric, s: float) -> float:
    """Upper bound on H^2 for a stable CMC sphere of radius s."""
    area = 4.0 * math.pi * s * s
    if area <= 0:
        raise OutOfDomain("sphere has zero area")
    return max(-2.0 * ricci_normal(metric, s), 64.0 * math.pi / (3.0 * area) + 4.0)
