"""Volumes of the two competitor families as functions of boundary area, and their large-area series."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InversionFailure, InvalidParameter, NoSignChange, OutOfDomain
from .metric import RadialMetric
from .numerics import Tolerances, find_root, fit_log_slope, integrate_to_infinity
from .quantities import (
    ball_volume,
    hyperbolic_ball_volume_exact,
    mean_curvature,
    renormalized_volume,
    renormalized_volume_of_mass,
)

PI = math.pi
COORD_BALL = "CoordBall"
GENERALIZED = "Generalized"
PROFILE_COLUMNS = ("area", "vol_coord_ball", "vol_generalized", "winner", "mean_curvature")
EXPANSION_COLUMNS = ("area", "exact", "series", "residual")
MASS_COEFFICIENT = 8.0 * math.sqrt(2.0) * PI**1.5


@dataclass(frozen=True)
class ProfileSample:
    area: float
    vol_coord_ball: float
    vol_generalized: float
    winner: str
    mean_curvature: float

    def row(self):
        return tuple(getattr(self, c) for c in PROFILE_COLUMNS)


@dataclass(frozen=True)
class ExpansionReport:
    areas: list
    exact: list
    series: list
    residuals: list
    fitted_order: float

    def rows(self):
        return list(zip(self.areas, self.exact, self.series, self.residuals))


class Variant(enum.Enum):
    HYPERBOLIC_BALL = "hyperbolic"
    SCHW_ADS_FULL = "full"
    SCHW_ADS_UNIFORM = "uniform"
    COMPACT_PERTURBATION = "perturbation"


def _radius(area):
    return math.sqrt(area / (4.0 * PI))


def coordinate_profile(metric: RadialMetric, area: float, tol: Tolerances | None = None) -> float:
    """Volume of the centered coordinate ball with boundary area ``area``."""
    if not area >= metric.horizon_area * (1 - 1e-14) or not area > 0:
        raise OutOfDomain(f"area {area} is below the horizon area {metric.horizon_area}")
    s = max(_radius(area), metric.horizon_radius)
    return ball_volume(metric, s, tol)


def generalized_competitor(metric: RadialMetric, area: float) -> float:
    """Volume enclosed by the horizon plus a hyperbolic ball far out, total boundary area ``area``."""
    if not area > metric.horizon_area:
        raise OutOfDomain(f"area {area} does not exceed the horizon area {metric.horizon_area}")
    return hyperbolic_ball_volume_exact(area - metric.horizon_area)


def compare_profile(metric: RadialMetric, areas, tol: Tolerances | None = None) -> list[ProfileSample]:
    out = []
    for area in areas:
        area = float(area)
        coord = coordinate_profile(metric, area, tol)
        gen = generalized_competitor(metric, area)
        winner = COORD_BALL if coord >= gen else GENERALIZED
        out.append(ProfileSample(area, coord, gen, winner, mean_curvature(metric, _radius(area))))
    return out


def lemma_h_squared(mass: float, area: float) -> float:
    """4 + 16 pi / A - 64 pi^{3/2} m A^{-3/2}: H^2 of the exact-region sphere of area A."""
    return 4.0 + 16.0 * PI / area - 64.0 * PI**1.5 * mass * area**-1.5


def profile_derivative_check(metric: RadialMetric, area: float, h_rel: float = 1e-5,
                             tol: Tolerances | None = None):
    """(fd_value, formula_value): central-difference (dV/dA)^-2 against the closed form."""
    h = area * h_rel
    if _radius(area - h) < metric.match_s:
        raise OutOfDomain(f"sphere of area {area} is not inside the exact region")
    hi = coordinate_profile(metric, area + h, tol)
    lo = coordinate_profile(metric, area - h, tol)
    fd = ((hi - lo) / (2.0 * h)) ** -2
    return fd, lemma_h_squared(metric.mass, area)


# -- large-area series ------------------------------------------------------------


def expansion_terms(mass: float, area: float, variant: Variant, v_renorm: float | None = None) -> dict:
    """Named terms of the truncated series for the given variant."""
    variant = Variant(variant)
    terms = {
        "linear": 0.5 * area,
        "log": -PI * math.log(area),
        "constant": PI * (1.0 + math.log(PI)),
    }
    if variant is Variant.HYPERBOLIC_BALL:
        terms["inv"] = -3.0 * PI**2 / area
        return terms
    if variant is Variant.COMPACT_PERTURBATION:
        if v_renorm is None:
            raise InvalidParameter("the perturbation variant needs the renormalized volume")
        terms["renormalized_volume"] = float(v_renorm)
    else:
        terms["renormalized_volume"] = renormalized_volume_of_mass(mass)
    terms["inv_sqrt"] = -8.0 * PI**1.5 * mass / math.sqrt(area)
    if variant is Variant.SCHW_ADS_UNIFORM:
        return terms
    terms["inv"] = -3.0 * PI**2 / area
    if variant is Variant.SCHW_ADS_FULL:
        terms["inv_three_halves"] = 16.0 * PI**2.5 * mass * area**-1.5
    return terms


def expansion_series(mass: float, area: float, variant: Variant, v_renorm: float | None = None,
                     omit=()) -> float:
    terms = expansion_terms(mass, area, variant, v_renorm)
    return math.fsum(v for k, v in terms.items() if k not in omit)


def hyperbolic_remainder(area: float) -> float:
    """Hyperbolic ball volume minus A/2 - pi log A + pi(1 + log pi) - 3 pi^2/A, without cancellation."""
    big_r = _radius(area)
    x = big_r**-2
    q = math.sqrt(1.0 + x)
    # 2 pi R^2 (sqrt(1+x) - 1 - x/2 + x^2/8)
    p_part = 2.0 * PI * big_r**2 * x**3 * (q + 3.0) / (8.0 * (q + 1.0) ** 3)
    # asinh R - log 2R - x/4 = log1p(y) - y - x^2 / (4 (1+q)^2), y = (q-1)/2
    y = x / (2.0 * (1.0 + q))
    if y < 1e-2:
        log_part = -y * y * (1 / 2 - y * (1 / 3 - y * (1 / 4 - y * (1 / 5 - y * (1 / 6 - y * (1 / 7 - y / 8))))))
    else:
        log_part = math.log1p(y) - y
    q_part = log_part - x * x / (4.0 * (1.0 + q) ** 2)
    return p_part - 2.0 * PI * q_part


def _tail_remainder(mass):
    """Density difference minus m s^-2 - 3/2 m s^-4, evaluated stably."""

    def fn(s):
        s = np.asarray(s, dtype=float)
        x = 1.0 / (s * s)
        u = 1.0 + s * s
        q = 2.0 * mass / (s * u)
        root = np.sqrt(1.0 - q)
        g_minus_1 = q * (1.0 / (1.0 + root) + 1.0) / (root * (1.0 + root))
        pw = (1.0 + x) ** -1.5
        small = x < 1e-3
        xs = np.where(small, x, 0.0)
        series = xs * xs * (15 / 8 - xs * (35 / 16 - xs * (315 / 128 - xs * 693 / 256)))
        direct = pw - 1.0 + 1.5 * x
        corr = np.where(small, series, direct)
        return mass * x * (pw * g_minus_1 + corr)

    return fn


def schwarzschild_residual(mass: float, area: float, tol: Tolerances | None = None) -> float:
    """Exact coordinate-ball volume minus the full series, for Schwarzschild-AdS of the given mass.

    Splits the volume as hyperbolic ball + V - 4 pi int_R^inf (density difference)
    so that V cancels exactly; what remains is the hyperbolic remainder and the
    integral of the density difference beyond its two leading terms.
    """
    rem = hyperbolic_remainder(area)
    if mass == 0:
        return rem
    big_r = _radius(area)
    if big_r <= 2.0 * mass:
        raise OutOfDomain(f"area {area} lies inside the horizon")
    tol = tol or Tolerances(abs_tol=1e-30, rel_tol=1e-11)
    tail = integrate_to_infinity(_tail_remainder(mass), big_r, tol, vectorized=True).value
    return rem - 4.0 * PI * tail


def expansion_residual(mass: float, area: float, variant: Variant, v_renorm: float | None = None,
                       metric: RadialMetric | None = None, omit=(), tol: Tolerances | None = None) -> float:
    """Signed exact-minus-series residual, computed without subtracting large numbers."""
    variant = Variant(variant)
    if variant is Variant.HYPERBOLIC_BALL:
        base = hyperbolic_remainder(area)
        full = expansion_terms(0.0, area, variant)
    else:
        base = schwarzschild_residual(mass, area, tol)
        full = expansion_terms(mass, area, Variant.SCHW_ADS_FULL)
    kept = expansion_terms(mass, area, variant, v_renorm if v_renorm is not None else full.get("renormalized_volume"))
    extra = [v for k, v in full.items() if k not in kept]
    extra += [v for k, v in kept.items() if k in omit]
    if variant is Variant.COMPACT_PERTURBATION:
        if metric is None:
            raise InvalidParameter("the perturbation variant needs the perturbed metric")
        if _radius(area) < metric.match_s:
            raise OutOfDomain(f"area {area} is not inside the exact region")
        extra.append(renormalized_volume(metric) - kept["renormalized_volume"])
    return base + math.fsum(extra)


def expansion_residual_order(mass: float, areas, variant: Variant, v_renorm: float | None = None,
                             metric: RadialMetric | None = None, omit=(),
                             tol: Tolerances | None = None) -> ExpansionReport:
    """Residuals |exact - series| over ``areas`` with their fitted log-log slope.

    ``mass`` may be a callable of the area (for uniform-regime sweeps).
    """
    areas = [float(a) for a in areas]
    variant = Variant(variant)
    if variant is Variant.COMPACT_PERTURBATION and v_renorm is None and metric is not None:
        v_renorm = renormalized_volume(metric)
    exact, series, residuals = [], [], []
    for a in areas:
        m = mass(a) if callable(mass) else mass
        ser = expansion_series(m, a, variant, v_renorm, omit)
        res = expansion_residual(m, a, variant, v_renorm, metric, omit, tol)
        series.append(ser)
        exact.append(ser + res)
        residuals.append(abs(res))
    order = fit_log_slope(areas, residuals)
    return ExpansionReport(areas, exact, series, residuals, order)


# -- isoperimetric expansion in volume ----------------------------------------------


def _invert(fn, target, guess, lo_limit, what):
    """Solve fn(A) = target for A by bracketing outward from ``guess``."""
    lo, hi = guess, guess
    for _ in range(200):
        if lo <= lo_limit or fn(lo) <= target:
            break
        lo = max(lo * 0.5, lo_limit)
    for _ in range(200):
        if fn(hi) >= target:
            break
        hi *= 2.0
    try:
        return find_root(lambda a: fn(a) - target, lo, hi, Tolerances(abs_tol=1e-14 * hi, rel_tol=1e-14))
    except NoSignChange as exc:
        raise InversionFailure(f"could not invert the {what} at volume {target}: {exc}") from None


def area_for_volume(metric: RadialMetric, volume: float) -> float:
    """Boundary area of the centered coordinate ball of the given volume."""
    if volume <= 0:
        raise InversionFailure(f"volume must be positive, got {volume}")
    guess = max(2.0 * volume, metric.horizon_area * 2.0, 1.0)
    return _invert(lambda a: coordinate_profile(metric, a), volume, guess,
                   max(metric.horizon_area, 1e-300), "coordinate profile")


def hyperbolic_area_for_volume(volume: float) -> float:
    if volume <= 0:
        raise InversionFailure(f"volume must be positive, got {volume}")
    guess = max(2.0 * volume, 1.0)
    return _invert(hyperbolic_ball_volume_exact, volume, guess, 1e-300, "hyperbolic profile")


def profile_expansion_check(metric: RadialMetric, volumes) -> list:
    """(V, (A_g(V) - A_hyp(V) + 2 V(M,g)) V^{1/2}) for each volume.

    Approaches 8 sqrt(2) pi^{3/2} m where coordinate balls are isoperimetric.
    """
    v_ren = renormalized_volume(metric) if metric.kind != "hyperbolic" else 0.0
    out = []
    for vol in volumes:
        vol = float(vol)
        a_g = area_for_volume(metric, vol)
        a_h = hyperbolic_area_for_volume(vol)
        out.append((vol, (a_g - a_h + 2.0 * v_ren) * math.sqrt(vol)))
    return out


def hyperbolic_metric_series_constant() -> float:
    """The R-form constant pi(1 - log 4) + pi log(4 pi), equal to pi(1 + log pi)."""
    return PI * (1.0 - math.log(4.0)) + PI * math.log(4.0 * PI)

