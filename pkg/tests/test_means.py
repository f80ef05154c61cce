import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardy_means.errors import EmptyInput, NonPositiveEntry
from hardy_means.generators import custom_generator, gini_chi, log_generator, power_generator
from hardy_means.means import (
    Gini, HomogeneousDeviation, PowerMean, QuasiArithmetic, check_mean_properties,
    deviation_mean, difference_deviation, evaluate, gini_deviation, gini_mean, power_mean,
    prefix_means, quasi_arithmetic_mean,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)
vectors = st.lists(positive, min_size=1, max_size=8)
exponents = st.sampled_from([-3.0, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0])


def test_documented_values():
    assert power_mean(1.0, [1, 2, 3]) == 2.0
    assert power_mean(0.0, [1, 4]) == pytest.approx(2.0, rel=1e-15)
    assert power_mean(-math.inf, [3, 1, 2]) == 1.0
    assert power_mean(math.inf, [3, 1, 2]) == 3.0
    assert gini_mean(2.0, 1.0, [1, 2, 3]) == pytest.approx(7 / 3, rel=1e-15)
    assert quasi_arithmetic_mean(log_generator(), [1, 4]) == pytest.approx(2.0, rel=1e-14)


def test_input_validation():
    with pytest.raises(EmptyInput):
        power_mean(1.0, [])
    with pytest.raises(NonPositiveEntry):
        power_mean(1.0, [1.0, 0.0])
    with pytest.raises(NonPositiveEntry):
        gini_mean(1.0, 0.0, [1.0, -2.0])


def test_extreme_exponents_stay_finite():
    xs = [1e-3, 1.0, 1e3]
    for p in (-300.0, 300.0):
        v = power_mean(p, xs)
        assert 1e-3 <= v <= 1e3
    assert 1e-3 <= gini_mean(300.0, -300.0, xs) <= 1e3


@given(vectors, exponents)
def test_power_mean_internal(xs, p):
    v = power_mean(p, xs)
    assert min(xs) <= v <= max(xs)


@given(vectors, st.floats(0.01, 100.0), exponents)
def test_power_mean_homogeneous(xs, lam, p):
    assert power_mean(p, [lam * x for x in xs]) == pytest.approx(lam * power_mean(p, xs), rel=1e-12)


@settings(max_examples=50)
@given(vectors, exponents)
def test_qa_of_power_generator_is_power_mean(xs, p):
    assert quasi_arithmetic_mean(power_generator(p), xs) == pytest.approx(power_mean(p, xs), rel=1e-9)


@given(vectors, exponents)
def test_gini_with_q_zero_is_power_mean(xs, p):
    assert gini_mean(p, 0.0, xs) == pytest.approx(power_mean(p, xs), rel=1e-12)


@given(vectors, exponents, exponents)
def test_gini_symmetric_in_parameters(xs, p, q):
    assert gini_mean(p, q, xs) == pytest.approx(gini_mean(q, p, xs), rel=1e-12)


@settings(max_examples=50)
@given(vectors)
def test_difference_deviation_is_qa(xs):
    g = custom_generator("x^0.5 + ln(x)")
    assert deviation_mean(difference_deviation(g), xs) == pytest.approx(quasi_arithmetic_mean(g, xs), rel=1e-9)


@settings(max_examples=50)
@given(vectors, st.sampled_from([(0.5, -1.0), (0.25, 0.0), (0.0, 0.0), (1.0, -1.0), (2.0, -0.5)]))
def test_gini_deviation_matches_closed_form(xs, pq):
    p, q = pq
    assert deviation_mean(gini_deviation(p, q), xs) == pytest.approx(gini_mean(p, q, xs), rel=1e-9)


@settings(max_examples=50)
@given(vectors, st.sampled_from([-1.0, 0.5, 0.75]))
def test_homogeneous_deviation_of_power_is_power_mean(xs, p):
    f = gini_chi(p, 0.0)  # (x^p - 1)/p
    assert evaluate(HomogeneousDeviation(f), xs) == pytest.approx(power_mean(p, xs), rel=1e-9)


def test_homogeneous_deviation_needs_f_of_one_zero():
    with pytest.raises(ValueError):
        HomogeneousDeviation(custom_generator("x"))


@pytest.mark.parametrize("m", [
    PowerMean(0.0), PowerMean(0.5), Gini(0.5, -1.0), Gini(-300.0, -300.0),
    QuasiArithmetic(custom_generator("x^0.5 + ln(x)")), HomogeneousDeviation(log_generator()),
])
def test_prefix_means_match_direct_evaluation(m):
    rng = np.random.default_rng(3)
    xs = np.exp(rng.uniform(-5, 5, 200))
    at = [1, 2, 7, 50, 200]
    got = prefix_means(m, xs, at=at)
    want = [evaluate(m, xs[:n]) for n in at]
    np.testing.assert_allclose(got, want, rtol=1e-11)


def test_prefix_means_in_log_domain_avoid_underflow():
    log_xs = -np.arange(1, 10_001) * math.log(2.0)  # 2**-n
    vals = prefix_means(PowerMean(0.5), log_xs=log_xs, at=[10_000])
    assert vals[0] > 0 and math.isfinite(vals[0])


def test_property_report_for_concave_means():
    for m in (PowerMean(0.5), Gini(0.5, -1.0), HomogeneousDeviation(log_generator())):
        assert check_mean_properties(m, rng_seed=0, trials=60).failures() == []


def test_property_report_flags_gini_two_one():
    rep = check_mean_properties(Gini(2.0, 1.0), rng_seed=0, trials=100)
    assert rep.monotone is False
    assert rep.jensen_concave_sampled is False
    assert rep.counterexample is not None


def test_property_report_is_seed_deterministic():
    a = check_mean_properties(Gini(2.0, 1.0), rng_seed=7, trials=40).to_dict()
    b = check_mean_properties(Gini(2.0, 1.0), rng_seed=7, trials=40).to_dict()
    assert a == b
