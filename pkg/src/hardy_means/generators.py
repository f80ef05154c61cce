"""Generator functions f of quasi-arithmetic and deviation means.

A :class:`Generator` bundles an expression with its first two symbolic
derivatives.  The shape tools here work with the index

    kappa_f(x) = x f''(x) / f'(x) + 1,

which is identically p for f(x) = x**p (and 0 for ln).  The index orders
quasi-arithmetic means pointwise and, through its behaviour near 0+,
controls their Hardy constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import expression as ex
from .errors import DerivativeVanishes, DomainError
from .numerics import Interval, extrapolate_limit

DEFAULT_DOMAIN = Interval(1e-6, 1e6)
DEFAULT_CHECK_POINTS = 200
COMPARE_TOL = 1e-9

FLEQG = "FLeqG"
GLEQF = "GLeqF"
INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class GridSpec:
    lo: float = 1e-3
    hi: float = 1e3
    count: int = 64

    def __post_init__(self):
        if not 0 < self.lo < self.hi:
            raise DomainError(f"grid needs 0 < lo < hi, got [{self.lo}, {self.hi}]")
        if self.count < 16:
            raise ValueError("grid count must be at least 16")

    def points(self) -> np.ndarray:
        return np.geomspace(self.lo, self.hi, self.count)


@dataclass(frozen=True, eq=False)
class Generator:
    """A strictly monotone C^2 function on a positive domain.

    ``kind`` is one of "power", "log", "gini_chi", "custom"; ``params``
    holds the catalog parameters (p for power, (p, q) for gini_chi).
    Construction samples ``domain`` on a log grid and rejects the function
    if it is non-finite there, if f' changes sign or vanishes, or if f is
    not strictly monotone on the samples.
    """

    expr: ex.Expression
    kind: str = "custom"
    params: tuple[float, ...] = ()
    domain: Interval = DEFAULT_DOMAIN
    d1: ex.Expression = field(init=False)
    d2: ex.Expression = field(init=False)

    def __post_init__(self):
        d1 = ex.differentiate(self.expr)
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", ex.differentiate(d1))
        self._validate()

    def __eq__(self, other):
        if not isinstance(other, Generator):
            return NotImplemented
        return (self.expr, self.kind, self.params, self.domain) == (
            other.expr, other.kind, other.params, other.domain)

    def __hash__(self):
        return hash((self.expr, self.kind, self.params, self.domain))

    def __repr__(self):
        return f"Generator({self.text!r}, kind={self.kind!r}, params={self.params})"

    @cached_property
    def _f(self):
        return ex.compile_expr(self.expr)

    @cached_property
    def _f1(self):
        return ex.compile_expr(self.d1)

    @cached_property
    def _f2(self):
        return ex.compile_expr(self.d2)

    @property
    def text(self) -> str:
        return ex.to_text(self.expr)

    def f(self, x):
        with np.errstate(all="ignore"):
            return self._f(x)

    def f1(self, x):
        with np.errstate(all="ignore"):
            return self._f1(x)

    def f2(self, x):
        with np.errstate(all="ignore"):
            return self._f2(x)

    @cached_property
    def increasing(self) -> bool:
        return bool(self.f1(self.domain.lo) > 0)

    def _validate(self) -> None:
        xs = np.geomspace(self.domain.lo, self.domain.hi, DEFAULT_CHECK_POINTS)
        fx, d1 = self.f(xs), self.f1(xs)
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(d1))):
            raise DomainError(f"generator {self.text!r} is not finite on [{self.domain.lo}, {self.domain.hi}]")
        if np.any(d1 == 0) or not (np.all(d1 > 0) or np.all(d1 < 0)):
            raise DerivativeVanishes(f"derivative of {self.text!r} vanishes or changes sign on the domain")
        steps = np.diff(fx)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError(f"generator {self.text!r} is not strictly monotone on the sampled domain")


# --------------------------------------------------------------------------
# catalog

def power_generator(p: float, domain: Interval = DEFAULT_DOMAIN) -> Generator:
    """pi_p: x**p for p != 0 and ln x for p == 0."""
    p = float(p)
    e = ex.Func("ln", ex.X) if p == 0 else ex.Pow(ex.X, p)
    return Generator(e, "power", (p,), domain)


def log_generator(domain: Interval = DEFAULT_DOMAIN) -> Generator:
    return Generator(ex.Func("ln", ex.X), "log", (), domain)


def gini_chi(p: float, q: float, domain: Interval = DEFAULT_DOMAIN) -> Generator:
    """chi_{p,q}(x) = (x**p - x**q)/(p - q), or x**p ln x when p == q."""
    p, q = float(p), float(q)

    def pw(k):
        return ex.Const(1.0) if k == 0 else ex.Pow(ex.X, k)

    if p == q:
        e = ex.Func("ln", ex.X) if p == 0 else ex.Mul(pw(p), ex.Func("ln", ex.X))
    else:
        e = ex.Div(ex.Sub(pw(p), pw(q)), ex.Const(p - q))
    return Generator(e, "gini_chi", (p, q), domain)


def custom_generator(text: str, domain: Interval = DEFAULT_DOMAIN) -> Generator:
    return Generator(ex.parse(text), "custom", (), domain)


def catalog(domain: Interval = DEFAULT_DOMAIN) -> list[Generator]:
    """The named generators used across the test suites."""
    gens = [log_generator(domain)]
    gens += [power_generator(p, domain) for p in (-2.0, -1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0)]
    gens += [gini_chi(p, q, domain) for p, q in
             ((0.5, -1.0), (0.5, 0.0), (0.25, -0.5), (0.75, -1.0), (1.0, -1.0), (0.0, 0.0))]
    return gens


# --------------------------------------------------------------------------
# kappa and shape

def kappa(g: Generator, x):
    """kappa_g(x) = x g''(x)/g'(x) + 1 (scalar or array ``x``)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("kappa is only defined for finite x > 0")
    d1 = g.f1(arr)
    if np.any(d1 == 0):
        raise DerivativeVanishes(f"{g.text!r} has zero derivative at a probe point")
    with np.errstate(all="ignore"):
        k = arr * g.f2(arr) / d1 + 1.0
    return float(k) if np.ndim(x) == 0 else k


ALL_ZERO, ALL_NEGATIVE, ALL_POSITIVE, MIXED = "AllZero", "AllNegative", "AllPositive", "Mixed"


@dataclass(frozen=True)
class ShapeReport:
    """Sampled shape of a generator.

    ``ratio_*`` refer to f'/f''.  ``kappa_liminf_at_zero`` and
    ``kappa_limsup_at_zero`` are the min/max over the samples x = lo*2**-j
    used for the limit, so they coincide with the limit when it exists.
    """

    f2_sign: str
    ratio_convex: bool
    ratio_negative: bool
    kappa_decreasing: bool
    kappa_limit_at_zero: float | None
    kappa_global_inf: float
    kappa_global_sup: float
    grid: tuple[float, ...]
    kappa_liminf_at_zero: float
    kappa_limsup_at_zero: float
    kappa_limit_converged: bool
    f_increasing: bool
    kappa_samples: tuple[float, ...] = ()
    tail_points: tuple[float, ...] = ()
    tail_kappa: tuple[float, ...] = ()

    @property
    def concave_eligible(self) -> bool:
        """Quasi-arithmetic mean of f is concave: f'' == 0, or f'/f'' convex and negative."""
        if self.f2_sign == ALL_ZERO:
            return True
        return self.f2_sign != MIXED and self.ratio_convex and self.ratio_negative

    @property
    def deviation_eligible(self) -> bool:
        """f increasing and concave, so x, y -> f(x/y) yields a concave homogeneous deviation mean."""
        return self.f_increasing and self.f2_sign in (ALL_ZERO, ALL_NEGATIVE)

    def to_dict(self) -> dict:
        return {
            "f2_sign": self.f2_sign,
            "ratio_convex": self.ratio_convex,
            "ratio_negative": self.ratio_negative,
            "kappa_decreasing": self.kappa_decreasing,
            "kappa_limit_at_zero": self.kappa_limit_at_zero,
            "kappa_liminf_at_zero": self.kappa_liminf_at_zero,
            "kappa_limsup_at_zero": self.kappa_limsup_at_zero,
            "kappa_limit_converged": self.kappa_limit_converged,
            "kappa_global_inf": self.kappa_global_inf,
            "kappa_global_sup": self.kappa_global_sup,
            "f_increasing": self.f_increasing,
            "concave_eligible": self.concave_eligible,
            "deviation_eligible": self.deviation_eligible,
            "grid": list(self.grid),
        }


def _sign_class(v: np.ndarray, scale: np.ndarray) -> str:
    tiny = np.abs(v) <= 1e-12 * scale
    if np.all(tiny):
        return ALL_ZERO
    if np.all(v < 0) and not np.any(tiny):
        return ALL_NEGATIVE
    if np.all(v > 0) and not np.any(tiny):
        return ALL_POSITIVE
    return MIXED


def _midpoint_convex(g: Generator, xs: np.ndarray, rtol: float = 1e-9) -> bool:
    with np.errstate(all="ignore"):
        def ratio(t):
            return g.f1(t) / g.f2(t)

        r = ratio(xs)
        a, b = np.triu_indices(len(xs), k=1)
        mid = ratio(0.5 * (xs[a] + xs[b]))
        chord = 0.5 * (r[a] + r[b])
        slack = rtol * (np.abs(r[a]) + np.abs(r[b]))
    if not np.all(np.isfinite(mid)) or not np.all(np.isfinite(chord)):
        return False
    return bool(np.all(mid <= chord + slack))


def _kappa_tail(g: Generator, lo: float, max_halvings: int = 60) -> tuple[np.ndarray, np.ndarray]:
    pts, vals = [], []
    for j in range(max_halvings + 1):
        x = math.ldexp(lo, -j)
        try:
            k = kappa(g, x)
        except (DerivativeVanishes, DomainError):
            break
        if not math.isfinite(k):
            break
        pts.append(x)
        vals.append(k)
    return np.array(pts), np.array(vals)


def shape_report(g: Generator, grid_spec: GridSpec = GridSpec(), tol: float = 1e-6) -> ShapeReport:
    """Sample the shape of ``g`` on a log grid and near 0+.

    The kappa limit at 0+ is estimated from x = lo*2**-j by geometric
    extrapolation.  If those samples do not settle (oscillation or drift
    larger than ``tol``), ``kappa_limit_at_zero`` is ``None`` unless they
    run off to +-inf.
    """
    xs = grid_spec.points()
    d1, d2 = g.f1(xs), g.f2(xs)
    if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
        raise DomainError(f"derivatives of {g.text!r} are not finite on the grid")
    if np.any(d1 == 0):
        raise DerivativeVanishes(f"{g.text!r} has zero derivative on the grid")
    f2_sign = _sign_class(d2, np.abs(d1) / xs)
    if f2_sign in (ALL_ZERO, MIXED):
        ratio_convex = ratio_negative = False
    else:
        ratio_negative = bool(np.all(d1 / d2 < 0))
        ratio_convex = _midpoint_convex(g, xs)
    ks = kappa(g, xs)
    kappa_decreasing = bool(np.all(np.diff(ks) <= 1e-12 * (1 + np.abs(ks[:-1]))))

    tail_x, tail_k = _kappa_tail(g, grid_spec.lo)
    limit, converged = None, False
    if len(tail_k) >= 4:
        window = tail_k[-min(len(tail_k), 16):]
        lim_est = extrapolate_limit([(2.0 ** j, k) for j, k in enumerate(window)], tol)
        spread = float(np.max(window[-4:]) - np.min(window[-4:]))
        if lim_est.converged or spread <= tol:
            converged = True
            limit = lim_est.extrapolated if lim_est.converged else float(window[-1])
            if abs(limit) < 1e-13:
                limit = 0.0
        elif np.all(np.diff(window) > 0) and lim_est.fitted_decay_exponent != lim_est.fitted_decay_exponent:
            limit = math.inf  # increments not shrinking: unbounded growth
        elif np.all(np.diff(window) < 0) and lim_est.fitted_decay_exponent != lim_est.fitted_decay_exponent:
            limit = -math.inf
    tail_window = tail_k[-16:] if len(tail_k) else ks[:1]
    liminf, limsup = float(np.min(tail_window)), float(np.max(tail_window))

    pool = [ks, tail_k]
    if limit is not None and math.isfinite(limit):
        pool.append(np.array([limit]))
    allk = np.concatenate(pool)
    return ShapeReport(
        f2_sign=f2_sign,
        ratio_convex=ratio_convex,
        ratio_negative=ratio_negative,
        kappa_decreasing=kappa_decreasing,
        kappa_limit_at_zero=limit,
        kappa_global_inf=float(np.min(allk)),
        kappa_global_sup=float(np.max(allk)),
        grid=tuple(float(v) for v in xs),
        kappa_liminf_at_zero=liminf,
        kappa_limsup_at_zero=limsup,
        kappa_limit_converged=converged,
        f_increasing=bool(np.all(d1 > 0)),
        kappa_samples=tuple(float(v) for v in ks),
        tail_points=tuple(float(v) for v in tail_x),
        tail_kappa=tuple(float(v) for v in tail_k),
    )


def compare_generators(
    f: Generator, g: Generator, grid_spec: GridSpec = GridSpec(), tol: float = COMPARE_TOL
) -> str:
    """Mikusinski comparison of QA_f and QA_g through kappa on a grid.

    Returns "FLeqG" when kappa_f <= kappa_g + tol at every grid point
    (ties go to FLeqG), "GLeqF" for the reverse, else "Incomparable".
    """
    xs = grid_spec.points()
    kf, kg = kappa(f, xs), kappa(g, xs)
    if not (np.all(np.isfinite(kf)) and np.all(np.isfinite(kg))):
        raise DomainError("kappa is not finite on the comparison grid")
    if np.all(kf <= kg + tol):
        return FLEQG
    if np.all(kg <= kf + tol):
        return GLEQF
    return INCOMPARABLE


def kappa_table(g: Generator, grid_spec: GridSpec = GridSpec()) -> list[tuple[float, float]]:
    xs = grid_spec.points()
    return list(zip(map(float, xs), map(float, kappa(g, xs))))


def grid_from(values: Sequence[float]) -> GridSpec:
    lo, hi, count = values
    return GridSpec(float(lo), float(hi), int(count))
