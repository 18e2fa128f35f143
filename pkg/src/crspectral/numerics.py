"""Special functions, bracketed root finding and semi-infinite quadrature.

Only the pieces the Rayleigh closed forms need: the exponential integral
E1, a derivative-free bracketed solver for the monotone power-constraint
equations, and an adaptive Gauss-Kronrod rule on [a, inf) used as the
independent quadrature oracle.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "DomainError",
    "BracketError",
    "ConvergenceError",
    "AccuracyError",
    "Interval",
    "Tolerance",
    "DEFAULT_TOL",
    "EULER_GAMMA",
    "exp_integral_e1",
    "find_root",
    "integrate",
    "integrate_semi_infinite",
]

EULER_GAMMA = 0.57721566490153286061

# E1 switches from the power series to the continued fraction here.
E1_CROSSOVER = 1.0


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before the tolerance was met."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message}; last bracket [{bracket[0]!r}, {bracket[1]!r}]")
        self.bracket = bracket


class AccuracyError(RuntimeError):
    """Adaptive quadrature could not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message}; estimate {estimate!r} +/- {error!r}")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval: lo={self.lo!r} >= hi={self.hi!r}")


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# Exponential integral
# ---------------------------------------------------------------------------

def _e1_series(x: float) -> float:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 0
    while True:
        k += 1
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_continued_fraction(x: float) -> float:
    # Modified Lentz on e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if d == 0.0:
            d = tiny
        c = b + an / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) <= 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError("E1 continued fraction did not converge", (x, x))


def exp_integral_e1(x: float) -> float:
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``.

    Power series for ``x <= 1``, Lentz continued fraction above. Relative
    error stays below 1e-12 on [1e-8, 700].
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"E1 is defined for x > 0 only, got {x!r}")
    if math.isinf(x):
        return 0.0
    if x <= E1_CROSSOVER:
        return _e1_series(x)
    return _e1_continued_fraction(x)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------

def find_root(
    f: Callable[[float], float],
    bracket: Interval | tuple[float, float],
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Bracketed, derivative-free root of a continuous scalar function.

    Illinois variant of regula falsi; each step falls back to bisection when
    the secant point does not shrink the bracket by at least half, so the
    worst case is never slower than plain bisection. Stops when
    ``|f(x)| <= abs_tol`` or the bracket width is ``<= rel_tol * |x|``.

    Raises
    ------
    BracketError
        ``f(lo)`` and ``f(hi)`` have the same sign.
    ConvergenceError
        ``tol.max_iter`` iterations did not meet the stopping rule.
    """
    if not isinstance(bracket, Interval):
        bracket = Interval(*bracket)
    a, b = float(bracket.lo), float(bracket.hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.isnan(fa) or math.isnan(fb) or (fa > 0) == (fb > 0):
        raise BracketError(
            f"no sign change on [{a!r}, {b!r}]: f(lo)={fa!r}, f(hi)={fb!r}"
        )

    last = None
    force_bisect = False
    prev_width = b - a
    for _ in range(int(tol.max_iter)):
        x = 0.5 * (a + b)
        if not force_bisect:
            secant = (a * fb - b * fa) / (fb - fa)
            if a < secant < b:
                x = secant
        fx = f(x)
        if abs(fx) <= tol.abs_tol:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
            if last == "lo":
                fb *= 0.5
            last = "lo"
        else:
            b, fb = x, fx
            if last == "hi":
                fa *= 0.5
            last = "hi"
        width = b - a
        if width <= tol.rel_tol * abs(x):
            return 0.5 * (a + b)
        force_bisect = width > 0.5 * prev_width
        prev_width = width
    raise ConvergenceError(
        f"find_root exceeded {tol.max_iter} iterations", (a, b)
    )


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _gk15(g: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fc = g(center)
    kronrod = fc * _WGK[7]
    gauss = fc * _WG[3]
    for j in range(7):
        dx = half * _XGK[j]
        pair = g(center - dx) + g(center + dx)
        kronrod += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    return kronrod * half, abs((kronrod - gauss) * half)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float = math.inf,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    An infinite upper limit is mapped onto ``[0, 1)`` through
    ``t = a + s / (1 - s)``. The interval with the largest error estimate is
    bisected until the summed estimate falls below
    ``max(abs_tol, rel_tol * |I|)``; ``tol.max_iter`` caps the number of
    subdivisions.
    """
    a = float(a)
    b = float(b)
    if b == a:
        return 0.0
    if b < a:
        return -integrate(f, b, a, tol)
    if math.isinf(a):
        raise DomainError("lower limit must be finite")

    if math.isinf(b):
        def g(s: float) -> float:
            if s >= 1.0:
                return 0.0
            inv = 1.0 / (1.0 - s)
            return f(a + s * inv) * inv * inv
        lo, hi = 0.0, 1.0
    else:
        g = f
        lo, hi = a, b

    value, err = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    for _ in range(int(tol.max_iter)):
        if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            return total
        neg_err, l, h, v = heapq.heappop(heap)
        mid = 0.5 * (l + h)
        if not l < mid < h:
            # interval cannot be split further in floating point
            heapq.heappush(heap, (neg_err, l, h, v))
            break
        v1, e1 = _gk15(g, l, mid)
        v2, e2 = _gk15(g, mid, h)
        heapq.heappush(heap, (-e1, l, mid, v1))
        heapq.heappush(heap, (-e2, mid, h, v2))
        # re-sum to avoid drift from repeated add/subtract
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
        return total
    raise AccuracyError("adaptive quadrature did not converge", total, total_err)


def integrate_semi_infinite(
    f: Callable[[float], float], a: float, tol: Tolerance = DEFAULT_TOL
) -> float:
    """``int_a^inf f(t) dt`` for an exponentially decaying integrand."""
    return integrate(f, a, math.inf, tol)
