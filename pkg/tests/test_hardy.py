import itertools
import json
import math

import numpy as np
import pytest

from hardy_means.generators import custom_generator, gini_chi, log_generator, power_generator
from hardy_means.hardy import (
    CLOSED_FORM_POWER, INTEGRAL_EQUATION, KAPPA_BOUNDS, HardyEstimate, SequenceSpec, custom,
    geometric, gini_hardy_constant, hardy_deviation_constant, hardy_limit_estimate, hardy_lower_bound,
    hardy_power_constant, harmonic, max_partial_ratio, power_law, qa_hardy_analysis, random_summable,
    verify_hardy_inequality,
)
from hardy_means.means import Gini, HomogeneousDeviation, PowerMean, QuasiArithmetic

# frozen reference values: 4**(2/3), 4**(4/3), 2**(1/1.5) ...
C_TABLE = [
    (-math.inf, 1.0),
    (-1.0, 2.0),
    (-0.5, 2.25),
    (0.0, math.e),
    (0.5, 4.0),
    (0.75, 6.349604207872798),
    (1.0, math.inf),
    (2.0, math.inf),
    (math.inf, math.inf),
]


@pytest.mark.parametrize("p, c", C_TABLE)
def test_power_constant_table(p, c):
    assert hardy_power_constant(p) == pytest.approx(c, rel=1e-15)


def test_power_constant_continuous_at_zero():
    assert hardy_power_constant(1e-9) == pytest.approx(math.e, rel=1e-8)
    assert hardy_power_constant(-1e-9) == pytest.approx(math.e, rel=1e-8)


@pytest.mark.parametrize("p, q, c", [
    (0.5, -1.0, 2.519842099789746),
    (0.5, 0.0, 4.0),
    (0.0, 0.0, math.e),
    (0.75, -1.0, 3.2813414240305514),
])
def test_gini_closed_form(p, q, c):
    assert gini_hardy_constant(p, q).constant == pytest.approx(c, rel=1e-14)
    assert gini_hardy_constant(q, p).constant == pytest.approx(c, rel=1e-14)


def test_gini_closed_form_outside_condition():
    est = gini_hardy_constant(2.0, 1.0)
    assert est.constant is None and est.caveats
    assert gini_hardy_constant(1.0, -1.0).constant == math.inf


def test_integral_equation_for_log_and_sqrt():
    assert hardy_deviation_constant(log_generator()).constant == pytest.approx(math.e, abs=1e-9)
    est = hardy_deviation_constant(custom_generator("x^0.5 - 1"))
    assert est.method == INTEGRAL_EQUATION
    assert est.constant == pytest.approx(4.0, abs=1e-9)


def test_integral_equation_detects_non_hardy():
    est = hardy_deviation_constant(custom_generator("x - 1"))
    assert est.constant == math.inf
    assert any("not a Hardy mean" in c for c in est.caveats)


@pytest.mark.parametrize("p, q", [(0.5, -1.0), (0.25, -0.5), (0.75, -1.0), (0.5, 0.0)])
def test_integral_matches_closed_form(p, q):
    closed = gini_hardy_constant(p, q).constant
    assert hardy_deviation_constant(gini_chi(p, q)).constant == pytest.approx(closed, abs=1e-8)


def test_limit_estimate_carleman():
    est = hardy_limit_estimate(PowerMean(0.0), n_max=100_000)
    assert abs(est.constant - math.e) < 1e-4
    assert est.diagnostics["fitted_decay_exponent"] == pytest.approx(1.0, abs=0.1)


def test_limit_estimate_growing_terms_give_infinity():
    assert hardy_limit_estimate(PowerMean(1.0), n_max=10_000).constant == math.inf


def test_limit_estimate_flags_failed_properties():
    est = hardy_limit_estimate(Gini(2.0, 1.0), n_max=10_000)
    assert any("jensen" in c for c in est.caveats)


def test_limit_estimate_homogeneous_deviation():
    est = hardy_limit_estimate(HomogeneousDeviation(log_generator()), n_max=20_000)
    assert est.constant == pytest.approx(math.e, abs=1e-3)


def test_lower_bound_power_zero():
    est = hardy_lower_bound(PowerMean(0.0), (0.5, 1.0, 2.0), n_max=100_000)
    assert est.constant == pytest.approx(math.e, abs=5e-3)
    assert est.constant <= math.e + 1e-9


def test_qa_analysis_closed_form_cases():
    est = qa_hardy_analysis(log_generator())
    assert est.method == CLOSED_FORM_POWER
    assert est.constant == pytest.approx(math.e, rel=1e-9)
    assert qa_hardy_analysis(power_generator(2.0)).constant == math.inf
    assert qa_hardy_analysis(power_generator(0.5)).constant == pytest.approx(4.0, rel=1e-6)


def test_qa_analysis_interval_case():
    est = qa_hardy_analysis(gini_chi(0.5, -1.0))
    assert est.method == KAPPA_BOUNDS and est.constant is None
    lo, hi = est.interval
    assert lo == pytest.approx(2.0, rel=1e-6)
    assert 2.0 < hi <= 4.0


def test_estimate_json_shape():
    est = HardyEstimate(math.inf, CLOSED_FORM_POWER, caveats=["not a Hardy mean"])
    data = json.loads(json.dumps(est.to_dict()))
    assert data["constant"] == "inf"
    assert set(data) == {"constant", "method", "interval", "caveats", "diagnostics"}


def test_sequence_specs():
    assert power_law(2.0).summable and not harmonic(1.0).summable
    assert geometric(0.5).summable and not geometric(2.0).summable
    assert random_summable(10, seed=1) == random_summable(10, seed=1)
    with pytest.raises(ValueError):
        SequenceSpec("custom", values=(1.0, -1.0))
    with pytest.raises(ValueError):
        custom([1.0]).log_terms(2)


@pytest.mark.parametrize("seq", [power_law(2.0), geometric(0.5), random_summable(10_000, seed=0)])
def test_inequality_holds_for_sqrt_mean(seq):
    rep = verify_hardy_inequality(PowerMean(0.5), seq, 10_000, 4.0)
    assert rep.satisfied and rep.ratio < 4.0
    assert rep.per_step_ratios[-1][0] == 10_000


def test_inequality_violated_below_constant():
    rep = verify_hardy_inequality(PowerMean(0.0), harmonic(1.0), 1000, 1.5)
    assert not rep.satisfied


def test_infinite_bound_always_satisfied():
    assert verify_hardy_inequality(PowerMean(2.0), harmonic(1.0), 1000, math.inf).satisfied


def test_verification_of_qa_mean():
    rep = verify_hardy_inequality(QuasiArithmetic(log_generator()), power_law(2.0), 2000, math.e)
    assert rep.satisfied


def test_partial_ratio_grows_slowly_for_harmonic_input():
    n, r = max_partial_ratio(PowerMean(0.5), harmonic(1.0), 100_000)
    assert n == 100_000 and 3.0 < r < 4.0


def test_min_mean_exact_cases():
    assert hardy_limit_estimate(PowerMean(-math.inf), n_max=1000).constant == 1.0
    assert hardy_lower_bound(PowerMean(-math.inf), n_max=1000).constant == 1.0
    assert verify_hardy_inequality(PowerMean(-math.inf), random_summable(500, seed=2), 500, 1.0).satisfied


def test_power_constant_nondecreasing():
    ps = [-math.inf] + list(np.linspace(-20.0, 0.99, 49))
    cs = [hardy_power_constant(p) for p in ps]
    assert all(b >= a for a, b in zip(cs, cs[1:]))


@pytest.mark.parametrize("p, q", list(itertools.product((-1.0, -0.5, 0.0), (0.0, 0.25, 0.5, 0.75))))
def test_gini_limit_agrees_within_reported_tolerance(p, q):
    closed = gini_hardy_constant(p, q).constant
    est = hardy_limit_estimate(Gini(p, q), n_max=100_000, check_properties=False)
    err = abs(est.constant - closed)
    if est.diagnostics["converged"]:
        assert err <= 1e-6
    else:
        # slow n**-1/4 decay: flagged, and off by a small multiple of the last gap
        assert any("did not converge" in c for c in est.caveats)
        assert err <= 5 * est.diagnostics["error_estimate"]


def test_kappa_interval_contains_limit_estimate():
    g = gini_chi(0.5, -1.0)
    lo, hi = qa_hardy_analysis(g).interval
    est = hardy_limit_estimate(QuasiArithmetic(g), n_max=100_000).constant
    assert lo - 5e-3 <= est <= hi + 5e-3


def test_lower_bound_below_limit():
    for p in (-1.0, 0.0, 0.5):
        bound = hardy_lower_bound(PowerMean(p), n_max=100_000).constant
        assert bound <= hardy_limit_estimate(PowerMean(p), n_max=100_000).constant + 5e-3
        assert bound <= hardy_power_constant(p)


def test_harmonic_ratio_nondecreasing_for_geometric_mean():
    rep = verify_hardy_inequality(PowerMean(0.0), harmonic(1.0), 100_000, math.e)
    ratios = [r for _, r in rep.per_step_ratios]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
