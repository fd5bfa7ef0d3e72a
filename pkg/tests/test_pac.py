import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from thicket import ConceptClass, LabeledExample, ThicketError, restrict
from thicket.pac import Distribution, consistent_learner, err, pac_experiment, sample_complexity
from thicket.zoo import powerset, thresholds


def test_consistent_learner_examples():
    assert consistent_learner(thresholds(3), []) == 0
    p2 = powerset(2)
    h = consistent_learner(p2, [LabeledExample(0, 1), LabeledExample(1, 0)])
    assert p2.concepts[h] == 0b01
    t3 = thresholds(3)
    assert t3.concepts[consistent_learner(t3, [LabeledExample(1, 1)])] == 0b011


def test_consistent_learner_errors():
    with pytest.raises(ThicketError, match="no consistent concept"):
        consistent_learner(thresholds(3), [LabeledExample(1, 1), LabeledExample(0, 0)])
    with pytest.raises(ThicketError):
        consistent_learner(thresholds(3), [LabeledExample(7, 1)])


def test_err_examples():
    u = Distribution.uniform(4)
    p4 = powerset(4)
    assert err(p4, 5, 5, u) == 0
    assert err(p4, 0b0001, 0b0000, u) == 0.25
    mu = Distribution((0.5, 0.5, 0, 0))
    assert err(p4, 0b1100, 0b0000, mu) == 0


def test_err_is_a_pseudometric():
    mu = Distribution((0.1, 0.2, 0.3, 0.4))
    p4 = powerset(4)
    for a, b, c in itertools.product(range(16), repeat=3):
        assert err(p4, a, b, mu) == err(p4, b, a, mu)
        assert err(p4, a, c, mu) <= err(p4, a, b, mu) + err(p4, b, c, mu) + 1e-15


def test_distribution_validation():
    with pytest.raises(ThicketError):
        Distribution((0.5, 0.4))
    with pytest.raises(ThicketError):
        Distribution((1.5, -0.5))
    with pytest.raises(ThicketError):
        err(powerset(2), 0, 1, Distribution.uniform(3))


def test_sample_complexity_values():
    assert sample_complexity(0.1, 0.05, 2) == 1124
    assert sample_complexity(0.1, 0.5, 1) == 562
    first = 4 / 0.1 * math.log2(2 / 0.05)
    assert first == pytest.approx(212.877, abs=1e-3)
    for bad in ((0, 0.1, 1), (0.1, 1, 1), (0.1, 0.1, 0)):
        with pytest.raises(ThicketError):
            sample_complexity(*bad)


def test_second_term_linear_in_d():
    second = lambda d: 8 * d / 0.2 * math.log2(13 / 0.2)
    assert second(4) == pytest.approx(2 * second(2))
    assert sample_complexity(0.2, 0.3, 4) == math.ceil(second(4))


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 6), st.floats(0.001, 0.5))
def test_sample_complexity_monotone(eps, delta, d, step):
    n = sample_complexity(eps, delta, d)
    assert sample_complexity(eps, delta, d + 1) >= n
    if eps + step < 1:
        assert sample_complexity(eps + step, delta, d) <= n
    if delta + step < 1:
        assert sample_complexity(eps, delta + step, d) <= n


def test_target_only_class_never_fails():
    cls = restrict(restrict(thresholds(4), 1, 1), 2, 0)
    cls = ConceptClass(cls.domain_size, cls.concepts)
    res = pac_experiment(cls, 0, Distribution.uniform(4), 0.1, 0.1, 100, 1)
    assert res.failure_fraction == 0
    assert res.mean_error == 0


def test_thresholds_meet_the_guarantee():
    cls = thresholds(64)
    res = pac_experiment(cls, 32, Distribution.uniform(64), 0.1, 0.1, 300, 4)
    assert res.sample_size == sample_complexity(0.1, 0.1, 1)
    assert res.failure_fraction < 0.1
    assert res.mean_error <= 0.1 + 0.1 * 0.9


def test_small_sample_shows_failures():
    cls = thresholds(64)
    res = pac_experiment(cls, 40, Distribution.uniform(64), 0.05, 0.1, 200, 4, sample_size=5)
    assert res.failure_fraction > 0.5


def test_experiment_validation_and_determinism():
    cls = thresholds(8)
    mu = Distribution.uniform(8)
    with pytest.raises(ThicketError, match="trials must be ≥ 100"):
        pac_experiment(cls, 0, mu, 0.1, 0.1, 50, 1)
    with pytest.raises(ThicketError):
        pac_experiment(cls, 9, mu, 0.1, 0.1, 100, 1)
    a = pac_experiment(cls, 3, mu, 0.3, 0.2, 100, 9, sample_size=4)
    b = pac_experiment(cls, 3, mu, 0.3, 0.2, 100, 9, sample_size=4, jobs=3)
    assert a == b
    assert a.to_json()["expected_error_bound"] == pytest.approx(0.2 + 0.3 * 0.8)
