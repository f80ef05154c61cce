"""Evaluation of power, quasi-arithmetic, Gini and deviation means.

Closed-form families (power, Gini) factor out the extreme entry before
summing powers and fall back to a log-sum-exp on overflow, so neither
large |p| nor tiny entries break them.  Solver
families invert f or solve the deviation equation with a bracketed root
search on [min x, max x], which internality guarantees to be a valid
bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import (
    BracketInvalid, DomainError, EmptyInput, NonFinite, NonPositiveEntry, RootBracketFailure,
)
from .generators import Generator, gini_chi
from .numerics import find_root_monotone

PROPERTY_TOL = 1e-9
_ROOT_RTOL = 1e-15
_LSE_SAFE_RANGE = 600.0


@dataclass(frozen=True)
class PowerMean:
    p: float

    def __post_init__(self):
        if math.isnan(self.p):
            raise ValueError("power mean parameter is NaN")

    @property
    def label(self) -> str:
        return f"power(p={self.p:g})"


@dataclass(frozen=True)
class QuasiArithmetic:
    g: Generator

    @property
    def label(self) -> str:
        return f"qa({self.g.text})"


@dataclass(frozen=True)
class Gini:
    p: float
    q: float

    @property
    def label(self) -> str:
        return f"gini(p={self.p:g}, q={self.q:g})"


@dataclass(frozen=True)
class Deviation:
    """A deviation E(x, y): zero on the diagonal, strictly decreasing in y.

    ``func`` takes a numpy array of x values and a scalar y.
    """

    func: Callable[[np.ndarray, float], np.ndarray] = field(compare=False)
    label: str = "deviation"
    homogeneous: bool = False


@dataclass(frozen=True)
class HomogeneousDeviation:
    """Deviation mean of E(x, y) = f(x / y) for increasing f with f(1) = 0."""

    f: Generator

    def __post_init__(self):
        at_one = float(self.f.f(1.0))
        if not abs(at_one) <= 1e-12:
            raise DomainError(f"homogeneous deviation generator needs f(1) = 0, got {at_one!r}")
        if not self.f.increasing:
            raise DomainError("homogeneous deviation generator must be increasing")

    @property
    def label(self) -> str:
        return f"devmean({self.f.text})"


MeanSpec = Union[PowerMean, QuasiArithmetic, Gini, Deviation, HomogeneousDeviation]

HOMOGENEOUS_FAMILIES = (PowerMean, Gini, HomogeneousDeviation)


def is_homogeneous(m: MeanSpec) -> bool:
    if isinstance(m, Deviation):
        return m.homogeneous
    return isinstance(m, HOMOGENEOUS_FAMILIES)


def _positive(xs: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(xs) if not isinstance(xs, np.ndarray) else xs, dtype=float).ravel()
    if arr.size == 0:
        raise EmptyInput("a mean needs at least one argument")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("mean arguments must be finite")
    if np.any(arr <= 0):
        raise NonPositiveEntry("mean arguments must be strictly positive")
    return arr


def _internal(value: float, xs: np.ndarray) -> float:
    # rounding can push a mean of nearly equal entries a hair outside [min, max]
    return float(min(max(value, xs.min()), xs.max()))


# --------------------------------------------------------------------------
# single evaluations

def power_mean(p: float, xs: Sequence[float]) -> float:
    """p-th power mean; min / geometric / max at p = -inf / 0 / +inf."""
    x = _positive(xs)
    if p == -math.inf:
        return float(x.min())
    if p == math.inf:
        return float(x.max())
    if p == 0:
        return _internal(math.exp(math.fsum(np.log(x)) / x.size), x)
    # factor out the entry that makes every (x/ref)**p <= 1
    ref = float(x.max() if p > 0 else x.min())
    with np.errstate(all="ignore"):
        s = math.fsum((x / ref) ** p) / x.size
        value = ref * s ** (1.0 / p)
    if not (math.isfinite(value) and value > 0):
        value = math.exp((logsumexp(p * np.log(x)) - math.log(x.size)) / p)
    return _internal(value, x)


def gini_mean(p: float, q: float, xs: Sequence[float]) -> float:
    x = _positive(xs)
    lx = np.log(x)
    if p != q:
        ref = float(x.max())
        with np.errstate(all="ignore"):
            num, den = math.fsum((x / ref) ** p), math.fsum((x / ref) ** q)
            value = ref * (num / den) ** (1.0 / (p - q))
        if not (math.isfinite(value) and value > 0 and num > 0 and den > 0
                and math.isfinite(num) and math.isfinite(den)):
            value = math.exp((logsumexp(p * lx) - logsumexp(q * lx)) / (p - q))
    else:
        v = p * lx
        w = np.exp(v - v.max())
        value = math.exp(math.fsum(w * lx) / math.fsum(w))
    return _internal(value, x)


def _mean_root(fn: Callable[[float], float], x: np.ndarray) -> float:
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return lo
    try:
        return find_root_monotone(fn, (lo, hi), _ROOT_RTOL, xtol=lo * 1e-16)
    except BracketInvalid as exc:
        raise RootBracketFailure(str(exc)) from exc


def quasi_arithmetic_mean(g: Generator, xs: Sequence[float]) -> float:
    """f^-1 of the average of f(x_i), with f^-1 found by root search."""
    x = _positive(xs)
    fx = g.f(x)
    if not np.all(np.isfinite(fx)):
        raise DomainError(f"generator {g.text!r} is not finite at the given arguments")
    target = math.fsum(fx) / x.size
    return _internal(_mean_root(lambda y: float(g.f(y)) - target, x), x)


def difference_deviation(g: Generator) -> Deviation:
    """E(x, y) = f(x) - f(y), sign-adjusted so E decreases in y."""
    sign = 1.0 if g.increasing else -1.0
    return Deviation(lambda x, y: sign * (g.f(x) - g.f(y)), f"diff({g.text})")


def ratio_deviation(f: Generator) -> Deviation:
    """E(x, y) = f(x / y)."""
    return Deviation(lambda x, y: f.f(x / y), f"ratio({f.text})", homogeneous=True)


def gini_deviation(p: float, q: float) -> Deviation:
    """E_{p,q}(x, y) = y**p * chi_{p,q}(x / y)."""
    chi = gini_chi(p, q)
    return Deviation(lambda x, y: y ** p * chi.f(x / y), f"gini_dev({p:g},{q:g})", homogeneous=True)


def deviation_mean(E: Deviation | Callable, xs: Sequence[float]) -> float:
    """Unique y solving sum_i E(x_i, y) = 0."""
    x = _positive(xs)
    func = E.func if isinstance(E, Deviation) else E

    def total(y: float) -> float:
        with np.errstate(all="ignore"):
            return math.fsum(func(x, y))

    return _internal(_mean_root(total, x), x)


def homogeneous_deviation_mean(f: Generator, xs: Sequence[float]) -> float:
    HomogeneousDeviation(f)  # validates f(1) = 0 and monotonicity
    return deviation_mean(ratio_deviation(f), xs)


def evaluate(m: MeanSpec, xs: Sequence[float]) -> float:
    if isinstance(m, PowerMean):
        return power_mean(m.p, xs)
    if isinstance(m, Gini):
        return gini_mean(m.p, m.q, xs)
    if isinstance(m, QuasiArithmetic):
        return quasi_arithmetic_mean(m.g, xs)
    if isinstance(m, HomogeneousDeviation):
        return deviation_mean(ratio_deviation(m.f), xs)
    if isinstance(m, Deviation):
        return deviation_mean(m, xs)
    raise TypeError(f"unknown mean spec {m!r}")


# --------------------------------------------------------------------------
# prefix evaluation M(x_1..x_n) for many n at once

def _cumulative_lse(v: np.ndarray) -> np.ndarray:
    if v.size and np.ptp(v) < _LSE_SAFE_RANGE:
        top = v.max()
        return top + np.log(np.cumsum(np.exp(v - top)))
    return np.logaddexp.accumulate(v)


def _select(at: np.ndarray | None, arr: np.ndarray) -> np.ndarray:
    return arr if at is None else arr[at - 1]


def prefix_means(
    m: MeanSpec,
    xs: Sequence[float] | None = None,
    *,
    log_xs: Sequence[float] | None = None,
    at: Sequence[int] | None = None,
) -> np.ndarray:
    """Values M(x_1, ..., x_n) for n = 1..N, or only for the counts in ``at``.

    Power and Gini means reuse running sums, so the cost is O(N) overall.
    Quasi-arithmetic means keep a running sum of f(x_k) and solve once per
    requested n; general deviation means solve each requested prefix from
    scratch.  Passing ``log_xs`` instead of ``xs`` keeps closed-form families
    exact for sequences whose terms underflow.
    """
    if (xs is None) == (log_xs is None):
        raise ValueError("pass exactly one of xs and log_xs")
    if log_xs is not None:
        lx = np.asarray(log_xs, dtype=float).ravel()
        if lx.size == 0:
            raise EmptyInput("empty sequence")
        if not np.all(np.isfinite(lx)):
            raise NonFinite("log terms must be finite")
        raw = None
    else:
        raw = _positive(xs)
        lx = np.log(raw)
    n_total = lx.size
    idx = None
    if at is not None:
        idx = np.asarray(sorted(set(int(n) for n in at)), dtype=np.int64)
        if idx.size == 0 or idx[0] < 1 or idx[-1] > n_total:
            raise ValueError(f"prefix counts must lie in [1, {n_total}]")
    counts = np.arange(1, n_total + 1, dtype=float)
    run_lo = np.minimum.accumulate(lx)
    run_hi = np.maximum.accumulate(lx)

    def finish(log_values: np.ndarray) -> np.ndarray:
        lo, hi = _select(idx, run_lo), _select(idx, run_hi)
        return np.exp(np.clip(log_values, lo, hi))

    if isinstance(m, PowerMean):
        p = m.p
        if math.isinf(p):
            # running extremes are exact on the raw values
            if raw is not None:
                acc = np.minimum.accumulate(raw) if p < 0 else np.maximum.accumulate(raw)
                return _select(idx, acc)
            return np.exp(_select(idx, run_lo if p < 0 else run_hi))
        if p == 0:
            return finish(_select(idx, np.cumsum(lx) / counts))
        lse = _cumulative_lse(p * lx)
        return finish(_select(idx, (lse - np.log(counts)) / p))

    if isinstance(m, Gini):
        p, q = m.p, m.q
        if p != q:
            diff = _cumulative_lse(p * lx) - _cumulative_lse(q * lx)
            return finish(_select(idx, diff / (p - q)))
        v = p * lx
        if np.ptp(v) < _LSE_SAFE_RANGE:
            w = np.exp(v - v.max())
            return finish(_select(idx, np.cumsum(w * lx) / np.cumsum(w)))
        log_den = np.logaddexp.accumulate(v)
        with np.errstate(divide="ignore"):
            pos = np.where(lx > 0, v + np.log(np.where(lx > 0, lx, 1.0)), -np.inf)
            neg = np.where(lx < 0, v + np.log(np.where(lx < 0, -lx, 1.0)), -np.inf)
        num = np.exp(np.logaddexp.accumulate(pos) - log_den) - np.exp(np.logaddexp.accumulate(neg) - log_den)
        return finish(_select(idx, num))

    x = np.exp(lx)
    if np.any(x <= 0):
        raise NonPositiveEntry("sequence terms underflow to zero; solver-based means need representable terms")
    wanted = idx if idx is not None else np.arange(1, n_total + 1)

    if isinstance(m, QuasiArithmetic):
        g = m.g
        fx = g.f(x)
        if not np.all(np.isfinite(fx)):
            raise DomainError(f"generator {g.text!r} is not finite on the sequence")
        running = np.cumsum(fx)
        out = np.empty(wanted.size)
        for j, n in enumerate(wanted):
            target = running[n - 1] / n
            lo, hi = math.exp(run_lo[n - 1]), math.exp(run_hi[n - 1])
            if lo == hi:
                out[j] = lo
                continue
            try:
                y = find_root_monotone(lambda y: float(g.f(y)) - target, (lo, hi), _ROOT_RTOL, xtol=lo * 1e-16)
            except BracketInvalid:
                # cumulative rounding at a near-tie; the exact mean sits at an endpoint
                y = lo if abs(float(g.f(lo)) - target) < abs(float(g.f(hi)) - target) else hi
            out[j] = min(max(y, lo), hi)
        return out

    if isinstance(m, (HomogeneousDeviation, Deviation)):
        return np.array([evaluate(m, x[:n]) for n in wanted])
    raise TypeError(f"unknown mean spec {m!r}")


# --------------------------------------------------------------------------
# property checks

@dataclass
class PropertyReport:
    """Sampled structural properties; each False flag has an entry in ``counterexamples``."""

    symmetric: bool = True
    repetition_invariant: bool = True
    monotone: bool = True
    internal: bool = True
    homogeneous: bool | None = None
    jensen_concave_sampled: bool = True
    counterexamples: dict[str, dict] = field(default_factory=dict)
    trials: int = 0

    @property
    def counterexample(self) -> dict | None:
        """First recorded counterexample, if any."""
        return next(iter(self.counterexamples.values()), None)

    def failures(self) -> list[str]:
        names = ["symmetric", "repetition_invariant", "monotone", "internal",
                 "homogeneous", "jensen_concave_sampled"]
        return [n for n in names if getattr(self, n) is False]

    def to_dict(self) -> dict:
        return {
            "symmetric": self.symmetric,
            "repetition_invariant": self.repetition_invariant,
            "monotone": self.monotone,
            "internal": self.internal,
            "homogeneous": self.homogeneous,
            "jensen_concave_sampled": self.jensen_concave_sampled,
            "counterexample": self.counterexample,
            "counterexamples": self.counterexamples,
            "trials": self.trials,
        }


def _random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))


def check_mean_properties(
    m: MeanSpec, rng_seed: int = 0, trials: int = 100, tol: float = PROPERTY_TOL
) -> PropertyReport:
    """Probe the defining properties of a mean on random vectors.

    Vectors have dimension 1..8 with entries log-uniform on [1e-3, 1e3].  A
    property fails only when the violation exceeds ``tol`` times the largest
    input, so round-off in solver-based families is not reported.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(rng_seed)
    report = PropertyReport(homogeneous=True if is_homogeneous(m) else None, trials=trials)

    def fail(name: str, **data) -> None:
        setattr(report, name, False)
        report.counterexamples.setdefault(
            name, {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in data.items()})

    for _ in range(trials):
        n = int(rng.integers(1, 9))
        x = _random_vector(rng, n)
        u = _random_vector(rng, n)
        mx = evaluate(m, x)
        scale = tol * max(1.0, float(x.max()))

        perm = rng.permutation(n)
        if abs(evaluate(m, x[perm]) - mx) > scale:
            fail("symmetric", x=x, permuted=x[perm])

        reps = int(rng.integers(2, 5))
        if abs(evaluate(m, np.repeat(x, reps)) - mx) > scale:
            fail("repetition_invariant", x=x, repeated=reps)

        bumped = x.copy()
        i = int(rng.integers(n))
        bumped[i] *= 1.0 + float(rng.uniform(0.01, 1.0))
        if evaluate(m, bumped) < mx - scale:
            fail("monotone", x=x, u=bumped)

        if not (x.min() - scale <= mx <= x.max() + scale):
            fail("internal", x=x, value=mx)

        if report.homogeneous is not None:
            lam = math.exp(float(rng.uniform(math.log(0.01), math.log(100.0))))
            if abs(evaluate(m, lam * x) - lam * mx) > tol * lam * max(1.0, float(x.max())):
                fail("homogeneous", x=x, scale=lam)

        mu = evaluate(m, u)
        mid = evaluate(m, 0.5 * (x + u))
        jscale = tol * max(1.0, float(x.max()), float(u.max()))
        if mid < 0.5 * (mx + mu) - jscale:
            fail("jensen_concave_sampled", x=x, u=u, gap=0.5 * (mx + mu) - mid)
    return report
