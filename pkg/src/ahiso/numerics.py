"""Numerical kernel: adaptive quadrature, ODE integration, root finding.

All routines are pure functions of their arguments. Integrands and right-hand
sides may be plain scalar callables; pass ``vectorized=True`` when the callable
accepts numpy arrays, which is much faster.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExhausted,
    DivergenceDetected,
    InsufficientData,
    InvalidParameter,
    NonFiniteValue,
    NonPositiveData,
    NoSignChange,
    StepUnderflow,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_evals: int = 1_000_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.max_evals > 0):
            raise InvalidParameter(f"tolerances must be positive: {self}")

    def replace(self, **changes) -> "Tolerances":
        fields = dict(abs_tol=self.abs_tol, rel_tol=self.rel_tol, max_evals=self.max_evals)
        fields.update(changes)
        return Tolerances(**fields)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


# 15-point Kronrod rule with its embedded 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_W[_i] = _w
    _GAUSS_W[14 - _i] = _w
_GAUSS_W[7] = _WG[3]


def _evaluate(f, x, vectorized):
    if vectorized:
        fx = np.asarray(f(x), dtype=float)
        if fx.shape != x.shape:
            fx = np.broadcast_to(fx, x.shape).astype(float)
    else:
        fx = np.array([f(float(xi)) for xi in x], dtype=float)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise NonFiniteValue(f"integrand is not finite at x={bad!r}")
    return fx


def _gk15(f, a, b, vectorized):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = _evaluate(f, c + h * _NODES, vectorized)
    kronrod = h * float(np.dot(_KRONROD_W, fx))
    gauss = h * float(np.dot(_GAUSS_W, fx))
    resabs = abs(h) * float(np.dot(_KRONROD_W, np.abs(fx)))
    err = abs(kronrod - gauss)
    # below this the Kronrod/Gauss difference is rounding noise
    floor = 50.0 * _EPS * resabs
    return kronrod, err, err <= floor


def integrate(f, a: float, b: float, tol: Tolerances | None = None, *,
              vectorized: bool = False) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].

    The worst panel is bisected until the summed |K15 - G7| estimate falls
    below ``max(abs_tol, rel_tol*|value|)``.
    """
    tol = tol or DEFAULT_TOL
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidParameter("integration limits must be finite; use integrate_to_infinity")
    if b < a:
        raise InvalidParameter(f"integrate requires a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)

    k, e, done = _gk15(f, a, b, vectorized)
    evals = 15
    # heap entries: (-error, a, b, value)
    heap = []
    settled_vals = []
    settled_err = 0.0
    if done:
        settled_vals.append(k)
        settled_err += e
    else:
        heap.append((-e, a, b, k))
    active_err = 0.0 if done else e

    while True:
        values = settled_vals + [item[3] for item in heap]
        total = math.fsum(values)
        total_err = settled_err + active_err
        if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)) or not heap:
            break
        if evals + 30 > tol.max_evals:
            raise BudgetExhausted(
                f"quadrature on [{a}, {b}] did not converge within {tol.max_evals} "
                f"evaluations (value {total!r}, error estimate {total_err:.3g})")
        neg_e, lo, hi, val = heapq.heappop(heap)
        active_err += neg_e
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi) or (hi - lo) <= 8 * _EPS * max(abs(lo), abs(hi)):
            # panel cannot be split further in floating point
            settled_vals.append(val)
            settled_err += -neg_e
            continue
        for sub_lo, sub_hi in ((lo, mid), (mid, hi)):
            ks, es, ds = _gk15(f, sub_lo, sub_hi, vectorized)
            evals += 15
            if ds:
                settled_vals.append(ks)
                settled_err += es
            else:
                heapq.heappush(heap, (-es, sub_lo, sub_hi, ks))
                active_err += es
        # guard against drift in the running sum
        active_err = max(active_err, 0.0)

    return QuadratureResult(total, total_err, evals)


def integrate_to_infinity(f, a: float, tol: Tolerances | None = None, *,
                          vectorized: bool = False) -> QuadratureResult:
    """Integrate f over [a, inf) via s = a + u/(1-u), u in [0, 1).

    A cheap divergence probe samples the transformed integrand as u -> 1; growth
    faster than (1-u)^-0.6 is reported as divergence.
    """
    a = float(a)

    def g(u):
        one_minus = 1.0 - u
        return _call(f, a + u / one_minus, vectorized) / (one_minus * one_minus)

    probe = np.array([1.0 - 10.0 ** (-k) for k in range(3, 9)])
    gp = np.abs(g(probe) if vectorized else np.array([g(p) for p in probe]))
    if np.all(np.isfinite(gp)) and gp[0] > 0:
        increasing = np.all(np.diff(gp) > 0)
        if increasing and gp[-1] > 1e3 * gp[0]:
            raise DivergenceDetected(
                f"integrand on [{a}, inf) decays too slowly (tail probe {gp[0]:.3g} -> {gp[-1]:.3g})")
    res = integrate(g, 0.0, 1.0, tol, vectorized=vectorized)
    return QuadratureResult(res.value, res.error_estimate, res.evaluations + len(probe))


def _call(f, x, vectorized):
    if vectorized:
        return f(x)
    return f(float(x))


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
# Hairer's continuous extension of order 4 for the Dormand-Prince pair
_D = np.array([-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
               -10690763975 / 1880347072, 701980252875 / 199316789632,
               -1453857185 / 822651844, 69997945 / 29380423])


class Trajectory:
    """Accepted ODE steps with dense output.

    Between steps the state is the cubic Hermite interpolant of the endpoint
    values and slopes plus the quartic correction term of the Dormand-Prince
    continuous extension. ``traj(t)`` accepts scalar or array t inside the
    integration range; the result has shape ``(*t.shape, n)``, or ``(n,)`` for
    scalar t.
    """

    def __init__(self, ts, ys, fs, quartic=None):
        self.t = np.asarray(ts, dtype=float)
        self.y = np.asarray(ys, dtype=float)
        self.f = np.asarray(fs, dtype=float)
        if quartic is None:
            quartic = np.zeros((len(self.t) - 1, self.y.shape[1]))
        self.quartic = np.asarray(quartic, dtype=float).reshape(len(self.t) - 1, self.y.shape[1])
        self._increasing = self.t[-1] >= self.t[0]

    @property
    def t0(self):
        return float(self.t[0])

    @property
    def t1(self):
        return float(self.t[-1])

    @property
    def final(self):
        return self.y[-1].copy()

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tq = np.atleast_1d(t_arr)
        lo, hi = sorted((self.t[0], self.t[-1]))
        span = hi - lo
        if np.any(tq < lo - 1e-12 * span) or np.any(tq > hi + 1e-12 * span):
            raise InvalidParameter(f"dense output requested outside [{lo}, {hi}]")
        if self._increasing:
            idx = np.searchsorted(self.t, tq, side="right") - 1
        else:
            idx = len(self.t) - 1 - np.searchsorted(self.t[::-1], tq, side="left")
        idx = np.clip(idx, 0, len(self.t) - 2)
        t0 = self.t[idx]
        h = self.t[idx + 1] - t0
        x = ((tq - t0) / h)[:, None]
        y0, y1 = self.y[idx], self.y[idx + 1]
        f0, f1 = self.f[idx] * h[:, None], self.f[idx + 1] * h[:, None]
        h00 = 2 * x**3 - 3 * x**2 + 1
        h10 = x**3 - 2 * x**2 + x
        h01 = -2 * x**3 + 3 * x**2
        h11 = x**3 - x**2
        out = h00 * y0 + h10 * f0 + h01 * y1 + h11 * f1 + (x * (1 - x)) ** 2 * self.quartic[idx]
        return out[0] if scalar else out.reshape(t_arr.shape + (self.y.shape[1],))


def solve_ode(rhs, t0: float, y0, t1: float, tol: Tolerances | None = None, *,
              max_step: float | None = None, first_step: float | None = None) -> Trajectory:
    """Integrate y' = rhs(t, y) from t0 to t1 with an adaptive Dormand-Prince pair.

    The local error of each accepted step satisfies the mixed absolute/relative
    tolerance in the RMS norm. Raises StepUnderflow when the step collapses.
    """
    tol = tol or DEFAULT_TOL
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    t = float(t0)
    t1 = float(t1)
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("initial state is not finite")

    def fun(tt, yy):
        out = np.atleast_1d(np.asarray(rhs(tt, yy), dtype=float))
        if not np.all(np.isfinite(out)):
            raise NonFiniteValue(f"ODE right-hand side is not finite at t={tt!r}")
        return out

    fcur = fun(t, y)
    evals = 1
    ts, ys, fs = [t], [y.copy()], [fcur.copy()]
    if t1 == t:
        return Trajectory(ts * 2, ys * 2, fs * 2)
    quartic = []

    direction = 1.0 if t1 > t else -1.0
    span = abs(t1 - t)
    max_step = span if max_step is None else min(max_step, span)
    atol, rtol = tol.abs_tol, tol.rel_tol

    if first_step is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((fcur / scale) ** 2))
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        h0 = min(h0, max_step)
        # refine with the second derivative from one explicit Euler step
        f1 = fun(t + direction * h0, y + direction * h0 * fcur)
        evals += 1
        d2 = np.sqrt(np.mean(((f1 - fcur) / scale) ** 2)) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100.0 * h0, h1, max_step)
    else:
        h = min(abs(first_step), max_step)

    k = np.empty((7, y.size))
    while direction * (t1 - t) > 0:
        min_h = 16 * _EPS * max(abs(t), span)
        if h < min_h:
            raise StepUnderflow(f"step size underflow at t={float(t)!r} (h={h:.3g})")
        last = h >= abs(t1 - t)
        if last:
            h = abs(t1 - t)
        hs = direction * h
        k[0] = fcur
        for i in range(1, 7):
            yi = y + hs * np.dot(_A[i], k[:i])
            k[i] = fun(t + _C[i] * hs, yi)
        evals += 6
        if evals > tol.max_evals:
            raise BudgetExhausted(f"ODE integration exceeded {tol.max_evals} evaluations at t={float(t)!r}")
        y_new = y + hs * np.dot(_B5, k)
        err_vec = hs * np.dot(_E, k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t = t1 if last else t + hs
            y = y_new
            fcur = k[6].copy()  # FSAL
            ts.append(t)
            ys.append(y.copy())
            fs.append(fcur.copy())
            quartic.append(hs * np.dot(_D, k))
            factor = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
            h = min(h * factor, max_step)
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
    return Trajectory(ts, ys, fs, quartic)


def find_root(f, lo: float, hi: float, tol: Tolerances | None = None) -> float:
    """Bracketed root of a continuous f on [lo, hi].

    Illinois-modified false position, falling back to bisection whenever the
    bracket fails to halve over three iterations. Stops when the bracket is no
    wider than abs_tol (or a few ulps at the root's magnitude).
    """
    tol = tol or DEFAULT_TOL
    a, b = float(lo), float(hi)
    if a > b:
        a, b = b, a
    fa, fb = float(f(a)), float(f(b))
    evals = 2
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise NonFiniteValue("function is not finite at the bracket ends")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise NoSignChange(f"f({a})={fa:.6g} and f({b})={fb:.6g} have the same sign")

    # (x0, f0) and (x1, f1) always straddle the root
    x0, f0, x1, f1 = a, fa, b, fb
    widths = [b - a]
    while True:
        lo_, hi_ = min(x0, x1), max(x0, x1)
        if hi_ - lo_ <= max(tol.abs_tol, 4 * _EPS * max(abs(lo_), abs(hi_))):
            return x0 if abs(f0) < abs(f1) else x1
        if evals >= tol.max_evals:
            raise BudgetExhausted(f"root finding exceeded {tol.max_evals} evaluations")
        bisect = len(widths) > 3 and widths[-1] > 0.5 * widths[-4]
        if bisect:
            x2 = 0.5 * (x0 + x1)
            widths = [widths[-1]]
        else:
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            if not (lo_ < x2 < hi_):
                x2 = 0.5 * (x0 + x1)
                bisect = True
        f2 = float(f(x2))
        evals += 1
        if not math.isfinite(f2):
            raise NonFiniteValue(f"function is not finite at x={x2!r}")
        if f2 == 0.0:
            return x2
        if f2 * f1 < 0:
            x0, f0 = x1, f1
        elif not bisect:
            f0 *= 0.5
        x1, f1 = x2, f2
        widths.append(abs(x1 - x0))


def fit_log_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise InvalidParameter("xs and ys differ in length")
    if x.size < 3:
        raise InsufficientData(f"need at least 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise NonPositiveData("log-log fit needs strictly positive data")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
