"""A compact perturbation of Schwarzschild-AdS with R < -6 somewhere whose large coordinate balls lose.

The mean curvature starts at 2 on a tiny horizon of radius ``eps``, spikes in a
bump just outside it (so the area radius reaches ``s1`` within unit distance)
and then blends into the Schwarzschild-AdS profile. The resulting volume deficit
makes the renormalized volume very negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HorizonConditionViolated, InfeasibleParameters, InvalidParameter, NoSignChange, PositivityFailed
from .isoprofile import GENERALIZED, compare_profile, coordinate_profile
from .metric import (
    H_PROFILE,
    RadialMetric,
    make_h_profile,
    potential,
    potential_derivative,
    scalar_curvature,
    scalar_curvature_at_r,
)
from .numerics import Tolerances, find_root, solve_ode
from .quantities import hyperbolic_ball_volume_exact, penrose_margin, renormalized_volume

R_TOL = 1e-6
MARGIN_TOL = 1e-6
DEFAULT_AREAS = tuple(float(a) for a in np.logspace(3, 12, 10))
_ODE_TOL = Tolerances(abs_tol=1e-12, rel_tol=1e-12)


@dataclass(frozen=True)
class CounterexampleParams:
    r0: float = 10.0
    eps: float = 0.1
    mass: float = 1.0
    s1: float | None = None  # defaults to sinh(r0 + 1)
    bump_width: float = 0.4
    ramp_slope: float = 1.0  # keeps H > 2 between the bump and the blend

    def __post_init__(self):
        if self.s1 is None:
            object.__setattr__(self, "s1", math.sinh(self.r0 + 1.0))
        if not self.r0 > 0 or not self.eps > 0 or not self.mass > 0:
            raise InvalidParameter("r0, eps and mass must be positive")
        if not self.s1 > 2.0 * self.mass:
            raise InvalidParameter(f"s1 = {self.s1} must exceed 2*mass = {2 * self.mass}")
        if not 0 < self.bump_width <= 0.5:
            raise InvalidParameter("bump_width must lie in (0, 1/2]")
        if not self.ramp_slope > 0:
            raise InvalidParameter("ramp_slope must be positive")


@dataclass(frozen=True)
class CounterexampleReport:
    min_scalar_curvature: float
    renorm_vol: float
    horizon_area: float
    penrose_margin: float
    profile_samples: list = field(repr=False)
    verdict_R_violated: bool
    verdict_margin_negative: bool
    verdict_balls_lose: bool

    def to_dict(self) -> dict:
        return {
            "min_scalar_curvature": self.min_scalar_curvature,
            "renorm_vol": self.renorm_vol,
            "horizon_area": self.horizon_area,
            "penrose_margin": self.penrose_margin,
            "profile_samples": [
                {"area": p.area, "vol_coord_ball": p.vol_coord_ball, "vol_generalized": p.vol_generalized,
                 "winner": p.winner, "mean_curvature": p.mean_curvature}
                for p in self.profile_samples
            ],
            "verdict_R_violated": self.verdict_R_violated,
            "verdict_margin_negative": self.verdict_margin_negative,
            "verdict_balls_lose": self.verdict_balls_lose,
        }


def _bump(x):
    """exp(4 - 1/(x(1-x))) on (0, 1): peak value 1 at x = 1/2, and its x-derivative."""
    if x <= 0.0 or x >= 1.0:
        return 0.0, 0.0
    q = x * (1.0 - x)
    val = math.exp(4.0 - 1.0 / q)
    return val, val * (1.0 - 2.0 * x) / (q * q)


def _smoothstep(x):
    if x <= 0.0:
        return 0.0, 0.0
    if x >= 1.0:
        return 1.0, 0.0
    return x**3 * (10.0 - 15.0 * x + 6.0 * x * x), 30.0 * x * x * (1.0 - x) ** 2


class _Profile:
    """H(r) for a fixed amplitude, coupled to phi through the blended exterior term."""

    def __init__(self, params: CounterexampleParams, amplitude: float):
        self.p = params
        self.a = amplitude
        self.end = params.r0 + 1.0

    def parts(self, r, phi):
        p = self.p
        b, db = _bump((r - p.r0) / p.bump_width)
        h_pre = 2.0 + self.a * b + p.ramp_slope * (r - p.r0)
        dh_pre = self.a * db / p.bump_width + p.ramp_slope
        w, dw = _smoothstep((r - p.r0 - 0.5) / 0.5)
        dw /= 0.5
        if w == 0.0:
            return h_pre, dh_pre, 0.0, 0.0, w, dw
        # clamped while shooting; a built profile with f <= 0 fails the H > 2 check
        fv = max(potential(p.mass, phi), 0.0)
        h_tail = 2.0 * math.sqrt(fv) / phi
        return h_pre, dh_pre, h_tail, fv, w, dw

    def h(self, r, phi):
        h_pre, _, h_tail, _, w, _ = self.parts(r, phi)
        return (1.0 - w) * h_pre + w * h_tail

    def h_and_dh(self, r, phi):
        h_pre, dh_pre, h_tail, fv, w, dw = self.parts(r, phi)
        h = (1.0 - w) * h_pre + w * h_tail
        if w == 0.0:
            return h, dh_pre
        if fv == 0.0:
            raise PositivityFailed(f"exterior potential is not positive at phi = {phi} (r = {r})")
        dphi = 0.5 * h * phi
        dh_tail = (potential_derivative(self.p.mass, phi) / phi - 2.0 * fv / (phi * phi)) * dphi / math.sqrt(fv)
        return h, (1.0 - w) * dh_pre - dw * h_pre + dw * h_tail + w * dh_tail

    def solve(self):
        def rhs(r, y):
            return (0.5 * self.h(r, math.exp(y[0])),)

        return solve_ode(rhs, self.p.r0, [math.log(self.p.eps)], self.end, _ODE_TOL)


def solve_amplitude(params: CounterexampleParams) -> float:
    """Bump amplitude for which phi(r0 + 1) = s1."""
    target = math.log(params.s1)

    def miss(a):
        return float(_Profile(params, a).solve().final[0]) - target

    if miss(0.0) >= 0.0:
        raise InfeasibleParameters(
            f"eps = {params.eps} already reaches s1 = {params.s1} without a bump; H > 2 forces overshoot")
    hi = 1.0
    while miss(hi) < 0.0:
        hi *= 2.0
        if hi > 1e7:
            raise InfeasibleParameters("no bump amplitude up to 1e7 reaches s1")
    try:
        return find_root(miss, 0.0, hi, Tolerances(abs_tol=1e-12 * hi, rel_tol=1e-13))
    except NoSignChange as exc:  # pragma: no cover - bracket is checked above
        raise InfeasibleParameters(str(exc)) from None


def construct(params: CounterexampleParams | None = None) -> RadialMetric:
    """Build the perturbed metric; the exact Schwarzschild-AdS region starts at r0 + 1."""
    params = params or CounterexampleParams()
    amplitude = solve_amplitude(params)
    shape = _Profile(params, amplitude)
    traj = shape.solve()

    def profile(r):
        phi = math.exp(float(traj(min(max(r, shape.p.r0), shape.end))[0]))
        return shape.h_and_dh(r, phi)

    try:
        return make_h_profile(params.r0, params.eps, profile, shape.end, params.mass)
    except HorizonConditionViolated as exc:
        raise PositivityFailed(str(exc)) from None


def min_scalar_curvature(metric: RadialMetric, n: int = 1000) -> float:
    """Minimum of the closed-form scalar curvature on an n-point grid.

    For h_profile metrics the grid covers the perturbed region (R = -6 beyond it);
    for exact metrics it covers a stretch of area radii outside the horizon.
    """
    if metric.kind == H_PROFILE:
        grid = np.linspace(metric.r0, metric.match_r, n)
        return min(-6.0, min(scalar_curvature_at_r(metric, float(r)) for r in grid))
    sh = max(metric.horizon_radius, 1e-3)
    grid = np.linspace(sh, 10.0 * (sh + 1.0), n)
    return min(scalar_curvature(metric, float(s)) for s in grid)


def _balls_lose(samples) -> bool:
    winners = [smp.winner == GENERALIZED for smp in samples]
    if True not in winners:
        return False
    first = winners.index(True)
    return all(winners[first:])


def verify(metric: RadialMetric, areas=DEFAULT_AREAS) -> CounterexampleReport:
    min_r = min_scalar_curvature(metric)
    v_ren = renormalized_volume(metric)
    margin = penrose_margin(metric)
    samples = compare_profile(metric, sorted(float(a) for a in areas))
    return CounterexampleReport(
        min_scalar_curvature=min_r,
        renorm_vol=v_ren,
        horizon_area=metric.horizon_area,
        penrose_margin=margin,
        profile_samples=samples,
        verdict_R_violated=min_r < -6.0 - R_TOL,
        verdict_margin_negative=margin < -MARGIN_TOL,
        verdict_balls_lose=_balls_lose(samples),
    )


def margin_asymptote(metric: RadialMetric, areas) -> list:
    """(A, hyperbolic ball volume - coordinate ball volume - A_horizon/2) for each area."""
    out = []
    for area in areas:
        area = float(area)
        gap = hyperbolic_ball_volume_exact(area) - coordinate_profile(metric, area) - 0.5 * metric.horizon_area
        out.append((area, gap))
    return out
