"""Rotationally symmetric asymptotically hyperbolic metrics.

Two charts are used throughout:

* area-radius chart ``g = f(s)^-1 ds^2 + s^2 g_S2``, with ``f(s) = 1 + s^2 - 2 m/s``
  for Schwarzschild-AdS of mass m (m = 0 is hyperbolic space);
* arclength chart ``g = dr^2 + phi(r)^2 g_S2``, where the mean curvature of the
  sphere ``{r} x S2`` is ``H = 2 phi'/phi``.

Metrics of kind ``h_profile`` are specified by their mean-curvature profile
``H(r)`` on ``[r0, match_r]`` and continue as an exact Schwarzschild-AdS exterior
beyond ``match_r``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import (
    HorizonConditionViolated,
    InvalidParameter,
    MatchingFailed,
    OutOfDomain,
)
from .numerics import DEFAULT_TOL, Tolerances, find_root, integrate, solve_ode

HYPERBOLIC = "hyperbolic"
SCHWARZSCHILD_ADS = "schwarzschild_ads"
H_PROFILE = "h_profile"

# relative tolerance for the C^0 match of phi and H at match_r
MATCH_RTOL = 1e-8
# relative tolerance for the C^1 match (H') at match_r
MATCH_DH_RTOL = 1e-6
HORIZON_GRID = 2000

_INTERIOR_TOL = Tolerances(abs_tol=1e-12, rel_tol=1e-12)
# the ramp's H closure and the interior warp are separate integrations; their
# mismatch enters R through 2/phi^2, so both run tighter
_RAMP_TOL = Tolerances(abs_tol=1e-13, rel_tol=1e-13)


def potential(mass: float, s):
    """f(s) = 1 + s^2 - 2 m / s."""
    return 1.0 + s * s - 2.0 * mass / s


def potential_derivative(mass: float, s):
    return 2.0 * s + 2.0 * mass / (s * s)


class SampledProfile:
    """Mean-curvature profile given by rows ``(r, H, dH)``.

    Interpolated by the cubic Hermite spline through the sampled values and
    slopes, so H is C^1 and H' is the spline derivative.
    """

    def __init__(self, rows):
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 2:
            raise InvalidParameter("h_samples must be a list of [r, H, dH] rows (at least 2)")
        if np.any(np.diff(data[:, 0]) <= 0):
            raise InvalidParameter("h_samples radii must be strictly increasing")
        self.rows = data
        self._spline = CubicHermiteSpline(data[:, 0], data[:, 1], data[:, 2])
        self._dspline = self._spline.derivative()

    def __call__(self, r):
        return self._spline(r), self._dspline(r)

    @property
    def r_min(self):
        return float(self.rows[0, 0])

    @property
    def r_max(self):
        return float(self.rows[-1, 0])


class _Interior:
    """Solved warp of an h_profile metric on [r0, match_r].

    State is (I, vol) with I' = H and vol' = 4 pi phi^2, phi = phi0 exp(I/2).
    """

    def __init__(self, r0, phi0, profile, match_r, tol):
        self.r0 = r0
        self.phi0 = phi0
        self.profile = profile
        self.match_r = match_r
        four_pi_phi0_sq = 4.0 * math.pi * phi0 * phi0

        def rhs(r, y):
            h = float(profile(r)[0])
            return (h, four_pi_phi0_sq * math.exp(y[0]))

        self.traj = solve_ode(rhs, r0, [0.0, 0.0], match_r, tol)
        self.log_ratio_nodes = 0.5 * self.traj.y[:, 0]

    def state(self, r):
        return self.traj(r)

    def phi(self, r):
        return self.phi0 * np.exp(0.5 * self.traj(r)[..., 0])

    def volume(self, r):
        return self.traj(r)[..., 1]

    @property
    def phi_end(self):
        return self.phi0 * math.exp(0.5 * self.traj.y[-1, 0])

    @property
    def volume_end(self):
        return float(self.traj.y[-1, 1])

    def r_of_s(self, s):
        target = math.log(s / self.phi0)
        nodes = self.log_ratio_nodes
        if target <= nodes[0]:
            return self.r0
        if target >= nodes[-1]:
            return self.match_r
        k = int(np.searchsorted(nodes, target)) - 1
        k = min(max(k, 0), len(nodes) - 2)
        lo, hi = self.traj.t[k], self.traj.t[k + 1]
        g = lambda r: 0.5 * float(self.traj(r)[0]) - target  # noqa: E731
        scale = max(abs(lo), abs(hi), 1.0)
        return find_root(g, lo, hi, Tolerances(abs_tol=1e-15 * scale, rel_tol=1e-15))


@dataclass(frozen=True, eq=False)
class RadialMetric:
    """Immutable rotationally symmetric metric.

    ``mass`` is the Schwarzschild-AdS mass (the tail mass for ``h_profile``).
    The remaining fields only apply to ``h_profile`` metrics.
    """

    kind: str
    mass: float = 0.0
    r0: float | None = None
    phi0: float | None = None
    h_profile: Callable | None = field(default=None, repr=False)
    match_r: float | None = None
    _interior: _Interior | None = field(default=None, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def horizon_radius(self) -> float:
        """Area radius of the horizon (0 for hyperbolic space)."""
        if self.kind == HYPERBOLIC:
            return 0.0
        if self.kind == SCHWARZSCHILD_ADS:
            return 2.0 * self.mass
        return float(self.phi0)

    @property
    def has_horizon(self) -> bool:
        return self.kind != HYPERBOLIC

    @property
    def horizon_area(self) -> float:
        return 4.0 * math.pi * self.horizon_radius**2

    @property
    def match_s(self) -> float:
        """Area radius beyond which the metric is exactly Schwarzschild-AdS."""
        if self.kind == H_PROFILE:
            return self._interior.phi_end
        return self.horizon_radius

    @property
    def tail_start_r(self) -> float:
        """Arclength-chart coordinate of the start of the exact region."""
        if self.kind == H_PROFILE:
            return float(self.match_r)
        return 0.0

    def f(self, s):
        """Exact-region potential 1 + s^2 - 2 m/s."""
        return potential(self.mass, s)

    def describe(self) -> dict:
        out = {
            "type": self.kind,
            "mass": self.mass,
            "horizon_radius": self.horizon_radius,
            "horizon_area": self.horizon_area,
        }
        if self.kind == H_PROFILE:
            out.update(r0=self.r0, phi0=self.phi0, match_r=self.match_r,
                       match_s=self.match_s, tail_mass=self.mass)
        return out


def make_hyperbolic() -> RadialMetric:
    return RadialMetric(HYPERBOLIC, 0.0)


def make_schwarzschild_ads(mass: float) -> RadialMetric:
    if not mass > 0:
        raise InvalidParameter(f"Schwarzschild-AdS mass must be positive, got {mass}")
    return RadialMetric(SCHWARZSCHILD_ADS, float(mass))


def _tail_h(mass, phi):
    fv = potential(mass, phi)
    return 2.0 * math.sqrt(fv) / phi, potential_derivative(mass, phi) / phi - 2.0 * fv / (phi * phi)


def make_h_profile(r0: float, phi0: float, h_profile, match_r: float, tail_mass: float,
                   tol: Tolerances | None = None) -> RadialMetric:
    """Metric with warp phi0*exp(1/2 int_r0^r H) on [r0, match_r] and an exact tail.

    ``h_profile`` is a callable ``r -> (H, H')`` or a list of ``[r, H, dH]``
    rows. Checks the horizon condition (H(r0) = 2, H > 2 beyond r0 on a grid)
    and the C^1 match with the Schwarzschild-AdS exterior of ``tail_mass``.
    """
    if not callable(h_profile):
        h_profile = SampledProfile(h_profile)
    r0, phi0, match_r, tail_mass = float(r0), float(phi0), float(match_r), float(tail_mass)
    if not phi0 > 0:
        raise InvalidParameter(f"phi0 must be positive, got {phi0}")
    if not match_r > r0:
        raise InvalidParameter(f"match_r must exceed r0 ({match_r} <= {r0})")
    if tail_mass < 0:
        raise InvalidParameter(f"tail mass must be non-negative, got {tail_mass}")
    if isinstance(h_profile, SampledProfile):
        span = h_profile.r_max - h_profile.r_min
        if h_profile.r_min > r0 + 1e-12 * span or h_profile.r_max < match_r - 1e-12 * span:
            raise InvalidParameter("h_samples must cover [r0, match_r]")

    h_start = float(h_profile(r0)[0])
    if abs(h_start - 2.0) > MATCH_RTOL * 2.0:
        raise HorizonConditionViolated(f"H(r0) = {h_start!r}, expected 2")
    grid = np.linspace(r0, match_r, HORIZON_GRID + 1)[1:]
    hs = np.array([float(h_profile(r)[0]) for r in grid])
    if np.any(hs <= 2.0):
        bad = grid[np.argmax(hs <= 2.0)]
        raise HorizonConditionViolated(
            f"H <= 2 at r = {bad!r}: the horizon is not outermost")

    interior = _Interior(r0, phi0, h_profile, match_r, tol or _INTERIOR_TOL)
    s1 = interior.phi_end
    if not s1 > 2.0 * tail_mass:
        raise MatchingFailed(f"matching radius s = {s1!r} lies inside the tail horizon 2m = {2 * tail_mass}")
    h_end, dh_end = (float(v) for v in h_profile(match_r))
    h_req, dh_req = _tail_h(tail_mass, s1)
    if abs(h_end - h_req) > MATCH_RTOL * h_req:
        raise MatchingFailed(
            f"H(match_r) = {h_end!r} but the exterior of mass {tail_mass} requires {h_req!r} at s = {s1!r}")
    if abs(dh_end - dh_req) > MATCH_DH_RTOL * max(1.0, abs(dh_req)):
        raise MatchingFailed(f"H'(match_r) = {dh_end!r} but the exterior requires {dh_req!r}")
    return RadialMetric(H_PROFILE, tail_mass, r0, phi0, h_profile, match_r, interior)


def _check_s(metric: RadialMetric, s: float):
    sh = metric.horizon_radius
    if not (s >= sh * (1 - 1e-14)) or not math.isfinite(s):
        raise OutOfDomain(f"s = {s!r} lies inside the horizon radius {sh!r}")
    if metric.kind == HYPERBOLIC and s <= 0:
        raise OutOfDomain("s must be positive for hyperbolic space")


def _in_interior(metric: RadialMetric, s: float) -> bool:
    return metric.kind == H_PROFILE and s < metric.match_s


def _interior_geometry(metric, s):
    r = metric._interior.r_of_s(s)
    h, dh = metric.h_profile(r)
    return r, float(h), float(dh)


def mean_curvature(metric: RadialMetric, s: float) -> float:
    """Mean curvature of the centered sphere of area radius s."""
    _check_s(metric, s)
    if _in_interior(metric, s):
        return _interior_geometry(metric, s)[1]
    return 2.0 * math.sqrt(metric.f(s)) / s


def h2_minus_4(metric: RadialMetric, s: float) -> float:
    """H^2 - 4 for the sphere of radius s, free of cancellation in the exact region."""
    _check_s(metric, s)
    if _in_interior(metric, s):
        h = _interior_geometry(metric, s)[1]
        return (h - 2.0) * (h + 2.0)
    return 4.0 * (1.0 - 2.0 * metric.mass / s) / (s * s)


def scalar_curvature(metric: RadialMetric, s: float) -> float:
    _check_s(metric, s)
    if _in_interior(metric, s):
        _, h, dh = _interior_geometry(metric, s)
        return -2.0 * dh - 1.5 * h * h + 2.0 / (s * s)
    fv = metric.f(s)
    return -2.0 * potential_derivative(metric.mass, s) / s + 2.0 * (1.0 - fv) / (s * s)


def ricci_normal(metric: RadialMetric, s: float) -> float:
    """Ric(nu, nu) = -2 phi''/phi for the radial unit normal."""
    _check_s(metric, s)
    if _in_interior(metric, s):
        _, h, dh = _interior_geometry(metric, s)
        return -dh - 0.5 * h * h
    return -potential_derivative(metric.mass, s) / s


def scalar_curvature_at_r(metric: RadialMetric, r: float) -> float:
    """Scalar curvature of the sphere at arclength coordinate r."""
    phi, _, h, dh = warp(metric, r)
    return -2.0 * dh - 1.5 * h * h + 2.0 / (phi * phi)


def _tail_warp(mass, r_start, s_start, r, tol):
    """phi(r) on the exact region from phi(r_start) = s_start, via d(log phi)/dr = sqrt(f)/phi."""
    if r == r_start:
        return s_start

    def rhs(_, y):
        phi = math.exp(y[0])
        return (math.sqrt(max(potential(mass, phi), 0.0)) / phi,)

    traj = solve_ode(rhs, r_start, [math.log(s_start)], r, tol or _INTERIOR_TOL)
    return math.exp(float(traj.final[0]))


def warp(metric: RadialMetric, r: float, tol: Tolerances | None = None):
    """Warp data (phi, phi', H, H') at arclength coordinate r.

    For exact metrics r is measured from the horizon (from the center for
    hyperbolic space); for h_profile metrics r is the metric's own coordinate,
    starting at r0.
    """
    r = float(r)
    if metric.kind == HYPERBOLIC:
        if r <= 0:
            raise OutOfDomain(f"r = {r!r} must be positive for hyperbolic space")
        phi = math.sinh(r)
        dphi = math.cosh(r)
        return phi, dphi, 2.0 * dphi / phi, -2.0 / phi**2
    if metric.kind == SCHWARZSCHILD_ADS:
        if r < 0:
            raise OutOfDomain(f"r = {r!r} lies inside the horizon")
        phi = _tail_warp(metric.mass, 0.0, 2.0 * metric.mass, r, tol)
    else:
        if r < metric.r0:
            raise OutOfDomain(f"r = {r!r} precedes r0 = {metric.r0!r}")
        if r <= metric.match_r:
            phi = float(metric._interior.phi(r))
            h, dh = (float(v) for v in metric.h_profile(r))
            return phi, 0.5 * h * phi, h, dh
        phi = _tail_warp(metric.mass, metric.match_r, metric.match_s, r, tol)
    h, dh = _tail_h(metric.mass, phi)
    return phi, 0.5 * h * phi, h, dh


def arclength(metric: RadialMetric, s: float, tol: Tolerances | None = None) -> float:
    """Radial distance from the horizon (center, for hyperbolic space) to the sphere of radius s."""
    _check_s(metric, s)
    tol = tol or DEFAULT_TOL
    mass = metric.mass

    def density(x):
        return 1.0 / np.sqrt(potential(mass, x)) if mass else 1.0 / np.sqrt(1.0 + x * x)

    if _in_interior(metric, s):
        return metric._interior.r_of_s(s) - metric.r0
    start = metric.match_s
    offset = (metric.match_r - metric.r0) if metric.kind == H_PROFILE else 0.0
    if s <= start:
        return offset
    return offset + integrate(density, start, s, tol, vectorized=True).value


def make_mass_ramp(m_inner: float, m_outer: float, s_start: float | None = None,
                   s_end: float | None = None, r0: float = 0.0,
                   tol: Tolerances | None = None) -> RadialMetric:
    """h_profile metric whose Hawking-mass function rises smoothly from m_inner to m_outer.

    In the area-radius chart ``f(s) = 1 + s^2 - 2 m(s)/s`` with m(s) a quintic
    smoothstep on [s_start, s_end]. Its scalar curvature is ``-6 + 4 m'(s)/s^2``,
    so R >= -6 exactly when m_outer >= m_inner. Equal masses reproduce exact
    Schwarzschild-AdS written in the arclength chart.
    """
    if not m_inner > 0:
        raise InvalidParameter("inner mass must be positive")
    sh = 2.0 * m_inner
    s_start = sh if s_start is None else float(s_start)
    s_end = s_start + 2.0 if s_end is None else float(s_end)
    if not (sh <= s_start < s_end):
        raise InvalidParameter("need 2*m_inner <= s_start < s_end")
    tol = tol or _RAMP_TOL
    width = s_end - s_start
    dm = m_outer - m_inner

    def mass_fn(s):
        x = min(max((s - s_start) / width, 0.0), 1.0)
        step = x**3 * (10.0 - 15.0 * x + 6.0 * x * x)
        dstep = 30.0 * x * x * (1.0 - x) ** 2 / width
        return m_inner + dm * step, dm * dstep

    def f_of(s):
        m, dmds = mass_fn(s)
        return 1.0 + s * s - 2.0 * m / s, 2.0 * s + 2.0 * m / (s * s) - 2.0 * dmds / s

    def f_only(s):
        return f_of(s)[0]

    r_len = integrate(lambda s: 1.0 / math.sqrt(f_only(s)), sh, s_end, tol).value
    match_r = r0 + r_len

    def rhs(_, y):
        phi = math.exp(y[0])
        return (math.sqrt(max(f_only(phi), 0.0)) / phi,)

    traj = solve_ode(rhs, r0, [math.log(sh)], match_r, tol)

    def profile(r):
        phi = float(np.exp(traj(r)[0]))
        fv, dfv = f_of(phi)
        fv = max(fv, 0.0)
        return 2.0 * math.sqrt(fv) / phi, dfv / phi - 2.0 * fv / (phi * phi)

    return make_h_profile(r0, sh, profile, match_r, m_outer, tol)


# -- metric files ---------------------------------------------------------------


def sample_profile(metric: RadialMetric, n: int = 4001) -> list:
    """Rows [r, H, dH] on [r0, match_r], refined where the interior ODE took small steps."""
    if isinstance(metric.h_profile, SampledProfile):
        return metric.h_profile.rows.tolist()
    uniform = np.linspace(metric.r0, metric.match_r, n)
    nodes = metric._interior.traj.t
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    rs = np.unique(np.concatenate([uniform, nodes, mids]))
    rs = rs[(rs >= metric.r0) & (rs <= metric.match_r)]
    rows = []
    for r in rs:
        h, dh = metric.h_profile(float(r))
        rows.append([float(r), float(h), float(dh)])
    return rows


def metric_to_dict(metric: RadialMetric, n_samples: int = 4001) -> dict:
    if metric.kind == HYPERBOLIC:
        return {"type": HYPERBOLIC}
    if metric.kind == SCHWARZSCHILD_ADS:
        return {"type": SCHWARZSCHILD_ADS, "mass": metric.mass}
    return {
        "type": H_PROFILE,
        "r0": metric.r0,
        "phi0": metric.phi0,
        "match_r": metric.match_r,
        "tail_mass": metric.mass,
        "h_samples": sample_profile(metric, n_samples),
    }


def metric_from_dict(data: dict) -> RadialMetric:
    kind = data.get("type")
    try:
        if kind == HYPERBOLIC:
            return make_hyperbolic()
        if kind == SCHWARZSCHILD_ADS:
            return make_schwarzschild_ads(float(data["mass"]))
        if kind == H_PROFILE:
            return make_h_profile(data["r0"], data["phi0"], data["h_samples"],
                                  data["match_r"], data["tail_mass"])
    except KeyError as exc:
        raise InvalidParameter(f"metric of type {kind!r} is missing field {exc.args[0]!r}") from None
    raise InvalidParameter(f"unknown metric type {kind!r}")


def load_metric(text: str) -> RadialMetric:
    """Parse an inline JSON metric spec, or ``@path`` naming a metric file."""
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.loads(text)
    return metric_from_dict(data)


def save_metric(metric: RadialMetric, path, n_samples: int = 4001):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metric_to_dict(metric, n_samples), fh)
        fh.write("\n")
