"""Numerical kernels: bracketed roots, quadrature, improper integrals, limits.

Everything here is a pure function of its arguments.  Callables are invoked
on plain Python floats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

from scipy import integrate, optimize

from .errors import BracketInvalid, InsufficientSamples, NonFinite, QuadratureFailed

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_LIMIT_TOL = 1e-6

# brentq rejects relative tolerances below this
_MIN_RTOL = 4 * 2.220446049250313e-16


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValueError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


CONVERGED = "Converged"
DIVERGED = "Diverged"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class IntegralResult:
    """Outcome of :func:`integrate_unit_improper`.

    ``value`` is only set when ``status == "Converged"``; ``increments`` holds
    the integral over each dyadic block [2**k, 2**(k+1)] in the u variable.
    """

    status: str
    value: float | None
    tail_bound: float
    evaluations: int
    increments: tuple[float, ...] = ()

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


@dataclass(frozen=True)
class LimitEstimate:
    raw_terms: tuple[tuple[float, float], ...]
    extrapolated: float
    converged: bool
    fitted_decay_exponent: float
    # estimates at the reported Aitken level, oldest first
    iterates: tuple[float, ...] = field(default=())

    @property
    def error_estimate(self) -> float:
        """Gap between the last two extrapolated iterates (inf if only one)."""
        if len(self.iterates) < 2:
            return math.inf
        return abs(self.iterates[-1] - self.iterates[-2])


def _checked(fn: Callable[[float], float], what: str) -> Callable[[float], float]:
    def wrapped(x: float) -> float:
        y = float(fn(x))
        if not math.isfinite(y):
            raise NonFinite(f"{what} returned {y} at x={x!r}")
        return y

    return wrapped


def find_root_monotone(
    fn: Callable[[float], float],
    bracket: Interval | tuple[float, float],
    tol: float = DEFAULT_ROOT_TOL,
    *,
    xtol: float | None = None,
) -> float:
    """Root of a continuous monotone ``fn`` inside ``bracket``.

    Brent's method (scipy's ``brentq``).  Terminates once the bracket is
    narrower than ``tol * max(1, |r|)``; an exact zero at an endpoint is
    returned as is.  ``xtol`` replaces the absolute part of that criterion,
    which callers working far below 1 need for full relative accuracy.
    """
    if not isinstance(bracket, Interval):
        lo, hi = bracket
        if lo == hi:
            return float(lo)
        bracket = Interval(float(lo), float(hi))
    if not tol > 0:
        raise ValueError("tol must be positive")
    f = _checked(fn, "root function")
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if flo == 0.0:
        return bracket.lo
    if fhi == 0.0:
        return bracket.hi
    if (flo > 0) == (fhi > 0):
        raise BracketInvalid(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: f(lo)={flo}, f(hi)={fhi}"
        )
    return float(
        optimize.brentq(
            f, bracket.lo, bracket.hi,
            xtol=tol / 2 if xtol is None else xtol,
            rtol=max(tol / 4, _MIN_RTOL), maxiter=500,
        )
    )


def integrate_finite(
    fn: Callable[[float], float], a: float, b: float, tol: float = DEFAULT_QUAD_TOL
) -> float:
    """Adaptive Gauss-Kronrod integral of ``fn`` over [a, b] (QUADPACK via scipy)."""
    if a > b:
        raise ValueError("integrate_finite needs a <= b")
    if a == b:
        return 0.0
    f = _checked(fn, "integrand")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=200)
    if not err <= tol:
        # quad falls short of a pure absolute target on large-magnitude pieces
        if err > max(tol, 1e-13 * abs(value)):
            raise QuadratureFailed(f"quadrature error estimate {err:.3g} exceeds tolerance {tol:.3g}")
    return float(value)


def integrate_unit_improper(
    fstar: Callable[[float], float],
    tol: float = DEFAULT_QUAD_TOL,
    budget: int = 1000,
    *,
    stall: int = 5,
) -> IntegralResult:
    """Integral of ``fstar`` over (0, 1] for an integrand singular only at 0.

    With u = 1/t the integral becomes the integral of fstar(1/u)/u**2 over
    [1, inf), which is accumulated over dyadic blocks [2**k, 2**(k+1)].
    Once the block increments decay geometrically, the remaining tail is
    summed as a geometric series; ``Converged`` is declared when that tail
    estimate drops to ``tol``.  ``Diverged`` is declared when the increments
    fail to decrease for ``stall`` consecutive doublings.  Running out of
    ``budget`` doublings (or of floating-point range) gives ``Inconclusive``.
    """
    if budget < 3:
        raise ValueError("budget must allow at least 3 doublings")
    f = _checked(fstar, "integrand")

    def integrand(u: float) -> float:
        return f(1.0 / u) / (u * u)

    piece_tol = tol / 100
    increments: list[float] = []
    total = 0.0
    evaluations = 0
    stalled = 0
    tail = math.inf
    for k in range(budget):
        lo, hi = math.ldexp(1.0, k), math.ldexp(1.0, k + 1)
        if math.isinf(hi):
            break
        d = integrate_finite(integrand, lo, hi, piece_tol)
        evaluations += 1
        increments.append(d)
        total += d
        if len(increments) < 3:
            continue
        prev = increments[-2]
        if abs(d) >= abs(prev) and d != 0.0:
            stalled += 1
            if stalled >= stall:
                return IntegralResult(DIVERGED, None, math.inf, evaluations, tuple(increments))
            continue
        stalled = 0
        if d == 0.0:
            tail = 0.0
        else:
            ratio = d / prev
            tail = d * ratio / (1.0 - ratio) if 0.0 < ratio < 1.0 else math.inf
        if abs(tail) <= tol:
            return IntegralResult(CONVERGED, total + tail, abs(tail), evaluations, tuple(increments))
    return IntegralResult(INCONCLUSIVE, None, abs(tail), evaluations, tuple(increments))


def _aitken(a0: float, a1: float, a2: float) -> tuple[float, float]:
    """Limit and decay ratio for three equally log-spaced terms.

    For a_n = L + c*n**(-alpha) sampled at n, r*n, r*r*n the increments
    shrink by exactly rho = r**(-alpha), so the Aitken delta-squared value
    a2 - d2**2/(d2 - d1) recovers L.  When rho is not in (0, 1) the
    formula is still the delta-squared transform, but no exponent is implied.
    """
    d1, d2 = a1 - a0, a2 - a1
    if d2 == 0.0:
        return a2, 0.0
    if d1 == d2:
        return a2, 1.0
    return a2 - d2 * d2 / (d2 - d1), d2 / d1 if d1 != 0.0 else math.inf


def extrapolate_limit(
    terms: Sequence[tuple[float, float]], tol: float = DEFAULT_LIMIT_TOL, max_levels: int = 3
) -> LimitEstimate:
    """Estimate lim a_n from terms sampled at geometrically spaced n.

    Each consecutive triple is fitted to a_n = L + c*n**(-alpha) (Aitken's
    delta-squared); the last raw triple gives the exponent.  The transform
    is repeated up to ``max_levels`` times and the reported value comes from
    the level whose last two estimates agree best.  ``converged`` means
    those two estimates agree to ``tol``.  If the increments do not
    shrink (rho >= 1) the raw last term is reported and ``converged`` is
    False.
    """
    terms = tuple((float(n), float(a)) for n, a in terms)
    if len(terms) < 4:
        raise InsufficientSamples(f"need at least 4 terms, got {len(terms)}")
    iterates: list[float] = []
    rho = math.nan
    for i in range(2, len(terms)):
        (_, a0), (_, a1), (_, a2) = terms[i - 2], terms[i - 1], terms[i]
        est, rho = _aitken(a0, a1, a2)
        iterates.append(est if rho < 1.0 else a2)
    n1, n2 = terms[-2][0], terms[-1][0]
    if 0.0 < rho < 1.0 and n2 > n1 > 0:
        alpha = -math.log(rho) / math.log(n2 / n1)
    elif rho == 0.0:
        alpha = math.inf
    else:
        alpha = math.nan
    if rho < 1.0:
        iterates = _deepest_stable_level(iterates, max_levels)
    converged = rho < 1.0 and abs(iterates[-1] - iterates[-2]) <= tol
    return LimitEstimate(terms, iterates[-1], converged, alpha, tuple(iterates))


def _deepest_stable_level(level: list[float], max_levels: int) -> list[float]:
    """Iterate the delta-squared transform and keep the level whose last two values agree best.

    A single pass only removes the leading n**-alpha term; the next
    correction (typically n**-2alpha) dominates when alpha is small.
    """
    best = level
    for _ in range(max_levels - 1):
        if len(level) < 4:
            break
        level = [_aitken(*level[i - 2:i + 1])[0] for i in range(2, len(level))]
        if not all(map(math.isfinite, level[-2:])):
            break
        if abs(level[-1] - level[-2]) < abs(best[-1] - best[-2]):
            best = level
    return best
