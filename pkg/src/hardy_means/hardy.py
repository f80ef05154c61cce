"""Hardy constants of means and empirical checks of the Hardy inequality.

The Hardy constant of a mean M is the least C (possibly +inf) with

    sum_n M(x_1, ..., x_n) <= C * sum_n x_n

for every positive sequence.  It is computed here in several independent
ways: closed forms for power and Gini means, extrapolation of
n * M(1, 1/2, ..., 1/n), an integral equation for homogeneous deviation
means, and kappa-based bounds for quasi-arithmetic means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DomainError
from .generators import GridSpec, Generator, shape_report
from .means import (
    MeanSpec, check_mean_properties, is_homogeneous, power_mean, prefix_means, quasi_arithmetic_mean,
)
from .numerics import (
    DEFAULT_LIMIT_TOL, DEFAULT_QUAD_TOL, DIVERGED, INCONCLUSIVE, IntegralResult, LimitEstimate,
    extrapolate_limit, find_root_monotone, integrate_finite, integrate_unit_improper,
)

CLOSED_FORM_POWER = "ClosedFormPower"
CLOSED_FORM_GINI = "ClosedFormGini"
LIMIT_EXTRAPOLATION = "LimitExtrapolation"
INTEGRAL_EQUATION = "IntegralEquation"
KAPPA_BOUNDS = "KappaBoundsInterval"
LIMINF_LOWER_BOUND = "LiminfLowerBound"

SATISFIED_SLACK = 1e-9
NOT_HARDY = "not a Hardy mean"


def jsonable(obj: Any) -> Any:
    """Convert to JSON-safe values; infinities become "inf" / "-inf", NaN becomes None."""
    if isinstance(obj, float) or isinstance(obj, np.floating):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    return obj


def limit_diagnostics(est: LimitEstimate) -> dict:
    return {
        "raw_terms": [list(t) for t in est.raw_terms],
        "extrapolated": est.extrapolated,
        "converged": est.converged,
        "fitted_decay_exponent": est.fitted_decay_exponent,
        "iterates": list(est.iterates),
        "error_estimate": est.error_estimate,
    }


def integral_diagnostics(res: IntegralResult) -> dict:
    return {
        "status": res.status,
        "value": res.value,
        "tail_bound": res.tail_bound,
        "evaluations": res.evaluations,
    }


@dataclass
class HardyEstimate:
    """A Hardy constant (or bounds for it) with provenance.

    ``constant`` is None when the method could not produce a value (for
    instance a bound-only result or violated hypotheses); ``interval`` is
    set for bound-only results.
    """

    constant: float | None
    method: str
    interval: tuple[float, float] | None = None
    diagnostics: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.method == KAPPA_BOUNDS:
            if self.interval is None or not self.interval[0] <= self.interval[1]:
                raise ValueError("a bounds result needs an interval with lo <= hi")

    @property
    def is_hardy(self) -> bool | None:
        if self.constant is not None:
            return math.isfinite(self.constant)
        if self.interval is not None:
            if math.isfinite(self.interval[1]):
                return True
            if math.isinf(self.interval[0]):
                return False
        return None

    def to_dict(self) -> dict:
        return jsonable({
            "constant": self.constant,
            "method": self.method,
            "interval": list(self.interval) if self.interval is not None else None,
            "caveats": list(self.caveats),
            "diagnostics": self.diagnostics,
        })


# --------------------------------------------------------------------------
# closed forms

def hardy_power_constant(p: float) -> float:
    """C(p): 1 at -inf, (1-p)**(-1/p) on (-inf,0) and (0,1), e at 0, +inf on [1, inf]."""
    if math.isnan(p):
        raise ValueError("p is NaN")
    if p == -math.inf:
        return 1.0
    if p >= 1:
        return math.inf
    if p == 0:
        return math.e
    # exp(-log1p(-p)/p) keeps accuracy as p -> 0
    return math.exp(-math.log1p(-p) / p)


def gini_concave_condition(p: float, q: float) -> bool:
    """min(p, q) <= 0 <= max(p, q) <= 1: G_{p,q} is increasing and concave."""
    return min(p, q) <= 0 <= max(p, q) <= 1


def gini_hardy_constant(p: float, q: float) -> HardyEstimate:
    diagnostics = {"p": p, "q": q}
    if not gini_concave_condition(p, q):
        return HardyEstimate(
            None, CLOSED_FORM_GINI, diagnostics=diagnostics,
            caveats=["Gini concavity hypotheses violated: need min(p,q) <= 0 <= max(p,q) <= 1"],
        )
    if max(p, q) >= 1:
        return HardyEstimate(math.inf, CLOSED_FORM_GINI, diagnostics=diagnostics, caveats=[NOT_HARDY])
    if p == q:  # only p == q == 0 survives the condition
        return HardyEstimate(math.e, CLOSED_FORM_GINI, diagnostics=diagnostics)
    value = math.exp(math.log((1 - p) / (1 - q)) / (q - p))
    return HardyEstimate(value, CLOSED_FORM_GINI, diagnostics=diagnostics)


# --------------------------------------------------------------------------
# limit n * M(1, 1/2, ..., 1/n)

def _geometric_samples(n_max: int, smallest: int = 8, count: int = 16) -> list[int]:
    levels = max(3, min(count - 1, int(math.floor(math.log2(n_max / smallest)))))
    n0 = n_max >> levels
    if n0 < 1:
        raise ValueError(f"n_max={n_max} is too small for geometric sampling")
    return [n0 << j for j in range(levels + 1)]


def _harmonic_terms(n: int, y: float = 1.0) -> np.ndarray:
    return y / np.arange(1, n + 1, dtype=float)


def _property_caveats(m: MeanSpec, seed: int, trials: int) -> list[str]:
    report = check_mean_properties(m, seed, trials)
    return [f"property check failed: {name}" for name in report.failures()]


def hardy_limit_estimate(
    m: MeanSpec,
    n_max: int = 100_000,
    tol: float = DEFAULT_LIMIT_TOL,
    *,
    check_properties: bool = True,
    seed: int = 0,
    property_trials: int = 25,
) -> HardyEstimate:
    """Extrapolate a_n = n * M(1, 1/2, ..., 1/n) over n = n0 * 2**j <= n_max.

    For an increasing, symmetric, repetition invariant, Jensen concave and
    homogeneous mean the limit is the Hardy constant.  Those hypotheses are
    probed on random vectors and each failure becomes a caveat; the estimate
    is returned regardless.
    """
    if n_max < 64:
        raise ValueError("n_max must be at least 64")
    samples = _geometric_samples(int(n_max))
    caveats = []
    if check_properties:
        caveats += _property_caveats(m, seed, property_trials)
    if not is_homogeneous(m):
        caveats.append("mean is not homogeneous: the limit need not equal the Hardy constant")
    values = prefix_means(m, _harmonic_terms(samples[-1]), at=samples)
    terms = [(n, n * v) for n, v in zip(samples, values)]
    est = extrapolate_limit(terms, tol)
    diagnostics = limit_diagnostics(est)
    diagnostics["n_max"] = samples[-1]
    diagnostics["tol"] = tol

    a = [t[1] for t in terms]
    growth = [a[i + 1] - a[i] for i in range(len(a) - 1)]
    unbounded = all(g > 0 for g in growth[-3:]) and all(
        growth[i + 1] >= growth[i] * 0.999 for i in range(len(growth) - 3, len(growth) - 1))
    if unbounded:
        caveats.append("terms keep growing without decay over the sampled range; reported as +inf")
        return HardyEstimate(math.inf, LIMIT_EXTRAPOLATION, diagnostics=diagnostics, caveats=caveats)
    if not est.converged:
        caveats.append(
            f"extrapolation did not converge to tol={tol:g} "
            f"(last iterates differ by {est.error_estimate:.3g}); best estimate returned")
    return HardyEstimate(est.extrapolated, LIMIT_EXTRAPOLATION, diagnostics=diagnostics, caveats=caveats)


def limit_table(m: MeanSpec, n_max: int = 100_000) -> list[tuple[int, float, float]]:
    """Rows (n, a_n, extrapolated_so_far) for convergence plots."""
    samples = _geometric_samples(int(n_max))
    values = prefix_means(m, _harmonic_terms(samples[-1]), at=samples)
    rows = []
    a = [n * v for n, v in zip(samples, values)]
    for i, n in enumerate(samples):
        if i >= 3:
            so_far = extrapolate_limit(list(zip(samples[: i + 1], a[: i + 1]))).extrapolated
        else:
            so_far = a[i]
        rows.append((n, a[i], so_far))
    return rows


def hardy_lower_bound(m: MeanSpec, ys: Sequence[float] = (1.0,), n_max: int = 100_000) -> HardyEstimate:
    """sup over ``ys`` of liminf_n (n/y) * M(y/1, ..., y/n).

    The liminf is replaced by the minimum over n in {n_max/8, n_max/4,
    n_max/2, n_max}, and the supremum by the maximum over the given ys.
    """
    if not ys:
        raise ValueError("need at least one y")
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    ns = [n_max // 8, n_max // 4, n_max // 2, n_max]
    per_y = []
    for y in ys:
        if not y > 0:
            raise DomainError("ys must be positive")
        values = prefix_means(m, _harmonic_terms(n_max, y), at=ns)
        ratios = [n / y * v for n, v in zip(ns, values)]
        per_y.append({"y": y, "samples": [[n, r] for n, r in zip(ns, ratios)], "liminf_surrogate": float(min(ratios))})
    best = max(per_y, key=lambda d: d["liminf_surrogate"])
    caveats = [f"liminf replaced by the minimum over n in [{ns[0]}, {n_max}]"]
    if len(ys) > 1 or not is_homogeneous(m):
        caveats.append("supremum over y taken over the supplied grid only")
    return HardyEstimate(
        best["liminf_surrogate"], LIMINF_LOWER_BOUND,
        diagnostics={"per_y": per_y, "argmax_y": best["y"]}, caveats=caveats,
    )


# --------------------------------------------------------------------------
# homogeneous deviation means: integral equation

BRACKET_CAP = 2.0 ** 64


def hardy_deviation_constant(f: Generator, tol: float = DEFAULT_QUAD_TOL) -> HardyEstimate:
    """Hardy constant of the deviation mean of E(x, y) = f(x/y).

    It is finite iff the integral of f(1/t) over (0, 1] is, and then it is
    the root c > 1 of F(c) = integral of f(1/t) over (0, c].  F increases
    on (0, 1) and decreases to -inf on (1, inf), so the upper bracket is
    doubled from 2 until F turns negative.
    """
    caveats = []
    at_one = float(f.f(1.0))
    if abs(at_one) > 1e-12:
        raise DomainError(f"generator must vanish at 1, got f(1) = {at_one!r}")
    shape = shape_report(f, GridSpec(f.domain.lo, f.domain.hi, 64))
    if not shape.f_increasing:
        raise DomainError("generator must be strictly increasing")
    if not shape.deviation_eligible:
        caveats.append("generator is not concave on the sampled grid: hypotheses of the integral criterion fail")

    def fstar(t: float) -> float:
        return float(f.f(1.0 / t))

    head = integrate_unit_improper(fstar, tol)
    diagnostics = {"integral_0_1": integral_diagnostics(head)}
    if head.status == DIVERGED:
        caveats.append(f"integrability condition fails: integral of f(1/t) over (0,1] diverges; {NOT_HARDY}")
        return HardyEstimate(math.inf, INTEGRAL_EQUATION, diagnostics=diagnostics, caveats=caveats)
    if head.status == INCONCLUSIVE:
        caveats.append("could not decide whether the integral of f(1/t) over (0,1] converges")
        return HardyEstimate(None, INTEGRAL_EQUATION, diagnostics=diagnostics, caveats=caveats)

    def F(c: float) -> float:
        return head.value + integrate_finite(fstar, 1.0, c, tol)

    lo, hi = 1.0, 2.0
    while F(hi) >= 0:
        lo, hi = hi, hi * 2
        if hi > BRACKET_CAP:
            caveats.append("BracketCap: F stayed positive up to c = 2**64")
            return HardyEstimate(None, INTEGRAL_EQUATION, diagnostics=diagnostics, caveats=caveats)
    c = find_root_monotone(F, (lo, hi))
    diagnostics["bracket"] = [lo, hi]
    diagnostics["residual"] = F(c)
    return HardyEstimate(c, INTEGRAL_EQUATION, diagnostics=diagnostics, caveats=caveats)


# --------------------------------------------------------------------------
# quasi-arithmetic means: kappa analysis

def _mulholland_check(g: Generator, p: float, seed: int, trials: int = 100) -> bool:
    """QA_g <= P_p on random vectors (the comparison behind Mulholland's criterion)."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), int(rng.integers(1, 9))))
        if quasi_arithmetic_mean(g, x) > power_mean(p, x) + 1e-9 * max(1.0, x.max()):
            return False
    return True


def qa_hardy_analysis(
    g: Generator, grid_spec: GridSpec = GridSpec(), tol: float = DEFAULT_LIMIT_TOL, seed: int = 0
) -> HardyEstimate:
    """Hardy constant of QA_g from the behaviour of kappa_g.

    1. kappa has a limit p at 0+ and never exceeds it: constant C(p).
    2. f'/f'' convex and negative (so kappa decreases): constant C(p) with
       p the limit at 0+.
    3. Otherwise only C(liminf_0 kappa) <= Hc <= C(sup kappa) is known.
    """
    shape = shape_report(g, grid_spec, tol)
    diagnostics: dict = {"shape": shape.to_dict()}
    caveats = ["kappa inf/sup sampled on the grid and on x = lo*2**-j only"]
    p0 = shape.kappa_limit_at_zero
    liminf = shape.kappa_liminf_at_zero if p0 is None else p0

    if p0 is not None and p0 == math.inf or liminf >= 1:
        caveats.append(f"kappa near 0+ is at least 1: {NOT_HARDY}")
        return HardyEstimate(math.inf, CLOSED_FORM_POWER, diagnostics=diagnostics, caveats=caveats)

    if shape.kappa_limit_converged and p0 is not None and math.isfinite(p0):
        if shape.kappa_global_sup <= p0 + tol:
            caveats.append("kappa has a limit p at 0+ and kappa <= p everywhere sampled: Hc = C(p)")
            return _power_result(p0, diagnostics, caveats)
        if shape.concave_eligible and shape.f2_sign != "AllZero":
            caveats.append("f'/f'' convex and negative: kappa decreasing, Hc = C(p) with p = kappa(0+)")
            if p0 < 1:
                ok = _mulholland_check(g, p0, seed)
                diagnostics["mulholland_qa_leq_power_mean"] = ok
                if not ok:
                    caveats.append("sampled comparison QA_f <= P_p failed")
            return _power_result(p0, diagnostics, caveats)

    q = liminf
    p = shape.kappa_global_sup
    lo, hi = hardy_power_constant(q), hardy_power_constant(p)
    caveats.append("only bounds are available: C(liminf kappa at 0+) <= Hc <= C(sup kappa)")
    diagnostics["kappa_bounds"] = [q, p]
    return HardyEstimate(None, KAPPA_BOUNDS, interval=(lo, hi), diagnostics=diagnostics, caveats=caveats)


def _power_result(p: float, diagnostics: dict, caveats: list[str]) -> HardyEstimate:
    diagnostics["p"] = p
    value = hardy_power_constant(p)
    if math.isinf(value):
        caveats.append(NOT_HARDY)
    return HardyEstimate(value, CLOSED_FORM_POWER, diagnostics=diagnostics, caveats=caveats)


# --------------------------------------------------------------------------
# sequences and verification

@dataclass(frozen=True)
class SequenceSpec:
    """Positive test sequence x_1, x_2, ...

    kind is "harmonic" (x_n = y/n), "powerlaw" (n**-s), "geometric" (r**n)
    or "custom" (explicit values).
    """

    kind: str
    param: float | None = None
    values: tuple[float, ...] = ()
    summable_hint: bool | None = None

    def __post_init__(self):
        if self.kind not in ("harmonic", "powerlaw", "geometric", "custom"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "harmonic" and not (self.param and self.param > 0):
            raise ValueError("harmonic sequence needs y > 0")
        if self.kind == "geometric" and not (self.param and self.param > 0):
            raise ValueError("geometric sequence needs r > 0")
        if self.kind == "powerlaw" and self.param is None:
            raise ValueError("power-law sequence needs an exponent s")
        if self.kind == "custom" and any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise ValueError("custom sequence terms must be positive and finite")

    @property
    def summable(self) -> bool | None:
        if self.kind == "powerlaw":
            return self.param > 1
        if self.kind == "geometric":
            return self.param < 1
        if self.kind == "harmonic":
            return False
        return self.summable_hint

    @property
    def label(self) -> str:
        if self.kind == "custom":
            return f"custom[{len(self.values)}]"
        return f"{self.kind}({self.param:g})"

    def log_terms(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=float)
        if self.kind == "harmonic":
            return math.log(self.param) - np.log(k)
        if self.kind == "powerlaw":
            return -self.param * np.log(k)
        if self.kind == "geometric":
            return k * math.log(self.param)
        if n > len(self.values):
            raise ValueError(f"custom sequence has only {len(self.values)} terms, {n} requested")
        return np.log(np.asarray(self.values[:n], dtype=float))


def harmonic(y: float = 1.0) -> SequenceSpec:
    return SequenceSpec("harmonic", float(y))


def power_law(s: float) -> SequenceSpec:
    return SequenceSpec("powerlaw", float(s))


def geometric(r: float) -> SequenceSpec:
    return SequenceSpec("geometric", float(r))


def custom(values: Sequence[float]) -> SequenceSpec:
    return SequenceSpec("custom", values=tuple(float(v) for v in values))


def random_summable(n: int, seed: int = 0) -> SequenceSpec:
    """x_k = u_k / k**2 with u_k log-uniform on [e**-3, e**3]."""
    rng = np.random.default_rng(seed)
    k = np.arange(1, n + 1, dtype=float)
    values = np.exp(rng.uniform(-3.0, 3.0, n)) / k ** 2
    return SequenceSpec("custom", values=tuple(values.tolist()), summable_hint=True)


@dataclass
class VerificationReport:
    N: int
    partial_mean_sum: float
    partial_x_sum: float
    ratio: float
    bound: float
    satisfied: bool
    per_step_ratios: list[tuple[int, float]] | None = None
    sequence: str = ""

    def to_dict(self) -> dict:
        return jsonable({
            "N": self.N,
            "partial_mean_sum": self.partial_mean_sum,
            "partial_x_sum": self.partial_x_sum,
            "ratio": self.ratio,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "per_step_ratios": [list(r) for r in self.per_step_ratios] if self.per_step_ratios else None,
            "sequence": self.sequence,
        })


def verify_hardy_inequality(
    m: MeanSpec, seq: SequenceSpec, N: int, bound: float = math.inf
) -> VerificationReport:
    """Compare sum_{n<=N} M(x_1..x_n) with bound * sum_{n<=N} x_n.

    ``per_step_ratios`` records the partial-sum ratio at n = 1, 2, 4, ...
    and at N.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    lx = seq.log_terms(int(N))
    means = prefix_means(m, log_xs=lx)
    x = np.exp(lx)
    mean_sums = np.cumsum(means)
    x_sums = np.cumsum(x)
    checkpoints = sorted({1 << k for k in range(int(math.log2(N)) + 1)} | {int(N)})
    steps = [(n, float(mean_sums[n - 1] / x_sums[n - 1])) for n in checkpoints]
    total_means, total_x = math.fsum(means), math.fsum(x)
    ratio = total_means / total_x
    return VerificationReport(
        N=int(N),
        partial_mean_sum=total_means,
        partial_x_sum=total_x,
        ratio=ratio,
        bound=float(bound),
        satisfied=bool(ratio <= bound + SATISFIED_SLACK),
        per_step_ratios=steps,
        sequence=seq.label,
    )


def max_partial_ratio(m: MeanSpec, seq: SequenceSpec, N: int) -> tuple[int, float]:
    """Largest partial-sum ratio over all prefixes n <= N, with its n."""
    lx = seq.log_terms(int(N))
    means = prefix_means(m, log_xs=lx)
    ratios = np.cumsum(means) / np.cumsum(np.exp(lx))
    i = int(np.argmax(ratios))
    return i + 1, float(ratios[i])


__all__ = [
    "HardyEstimate", "VerificationReport", "SequenceSpec", "hardy_power_constant",
    "gini_hardy_constant", "hardy_limit_estimate", "hardy_lower_bound", "hardy_deviation_constant",
    "qa_hardy_analysis", "verify_hardy_inequality", "harmonic", "power_law", "geometric", "custom",
    "random_summable", "limit_table", "max_partial_ratio", "jsonable",
]
