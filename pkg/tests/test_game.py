import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import game_oracle, soa_oracle
from strategies import classes
from thicket import ConceptClass, ThicketError, class_from_sets, littlestone_dim
from thicket.game import (
    SOALearner,
    game_value,
    make_learner,
    optimal_adversary_step,
    play_adversarial,
    play_random,
    run_game,
    soa_predict,
    worst_case_mistakes,
)
from thicket.zoo import cosets, powerset, singletons, thresholds


def test_soa_predict_examples():
    assert soa_predict(powerset(2), 0)[0] == 0
    assert soa_predict(class_from_sets(2, [{0}, {0, 1}]), 0)[0] == 1
    pred, (v0, v1) = soa_predict(thresholds(3), 1)
    assert pred == 0
    assert littlestone_dim(v0) == littlestone_dim(v1) == 1
    with pytest.raises(ThicketError, match="realizability"):
        soa_predict(ConceptClass.empty(2), 0)


def test_run_game_examples():
    assert run_game(powerset(3), 5, [], SOALearner()).total_mistakes == 0
    single = ConceptClass(3, (0b110,))
    t = run_game(single, 0, [0, 1, 2, 1, 0], SOALearner())
    assert t.total_mistakes == 0
    assert [r.label for r in t.rounds] == [0, 1, 1, 1, 0]


def test_run_game_validates_inputs():
    with pytest.raises(ThicketError):
        run_game(powerset(2), 4, [0], SOALearner())
    with pytest.raises(ThicketError, match="index out of range"):
        run_game(powerset(2), 0, [2], SOALearner())


def test_transcript_csv_columns():
    t = run_game(thresholds(3), 2, [0, 1, 2], SOALearner())
    lines = t.to_csv().split("\r\n")
    assert lines[0] == "round,example,prediction,label,loss,ldim_after"
    assert len(lines) == 5 and lines[-1] == ""
    assert t.to_json()["total_mistakes"] == t.total_mistakes


@settings(max_examples=30)
@given(classes(max_domain=3, max_concepts=8), st.data())
def test_soa_predictions_match_oracle(cls, data):
    target = data.draw(st.integers(0, len(cls) - 1))
    schedule = data.draw(st.lists(st.integers(0, cls.domain_size - 1), max_size=5))
    t = run_game(cls, target, schedule, SOALearner())
    labels = [r.label for r in t.rounds]
    assert [r.prediction for r in t.rounds] == soa_oracle(cls.domain_size, cls.concepts, schedule, labels)


def test_adversary_examples():
    for name in ("soa", "always0", "always1", "majority"):
        assert play_adversarial(powerset(1), make_learner(name)).total_mistakes == 1
    single = ConceptClass(2, (0b01,))
    assert play_adversarial(single, SOALearner()).total_mistakes == 0
    assert play_adversarial(single, SOALearner(), rounds=4).total_mistakes == 0
    for name in ("soa", "always0", "always1"):
        assert play_adversarial(thresholds(3), make_learner(name)).total_mistakes == 2
    assert play_adversarial(powerset(3), SOALearner()).total_mistakes == 3


def test_adversary_step_needs_version():
    with pytest.raises(ThicketError):
        optimal_adversary_step(ConceptClass.empty(2), lambda x: 0)


def test_adversarial_transcript_is_realizable():
    t = play_adversarial(cosets(4), make_learner("always1"))
    c = cosets(4).concepts[t.target]
    assert all(((c >> r.example) & 1) == r.label for r in t.rounds)
    assert t.total_mistakes == 3


def test_game_value_examples():
    assert game_value(powerset(3)) == 3
    assert game_value(ConceptClass(4, (3,))) == 0
    assert game_value(singletons(4)) == 1


@given(classes(max_domain=4, max_concepts=8))
def test_game_value_matches_minimax_oracle_and_ldim(cls):
    v = game_value(cls)
    assert v == game_oracle(cls.domain_size, cls.concepts)
    assert v == littlestone_dim(cls)


@given(classes(max_domain=4, max_concepts=10))
def test_soa_worst_case_is_ldim_without_drop_violations(cls):
    report = worst_case_mistakes(cls, SOALearner())
    assert report.max_mistakes == littlestone_dim(cls)
    assert report.drop_violations == 0


def test_worst_case_constant_learner():
    # once the target is pinned down a constant learner can be wrong on a forced label forever
    assert worst_case_mistakes(singletons(3), make_learner("always1")).max_mistakes == math.inf
    assert worst_case_mistakes(singletons(3), make_learner("always0")).max_mistakes == math.inf
    assert worst_case_mistakes(singletons(3), make_learner("majority")).max_mistakes == 1


def test_worst_case_rejects_random_learner():
    with pytest.raises(ThicketError):
        worst_case_mistakes(powerset(2), make_learner("random", 1))


@given(classes(max_domain=4, max_concepts=8), st.integers(0, 50))
def test_random_adversary_is_realizable_and_deterministic(cls, seed):
    a = play_random(cls, make_learner("random", seed), 6, seed)
    b = play_random(cls, make_learner("random", seed), 6, seed)
    assert a.to_json() == b.to_json()
    c = cls.concepts[a.target]
    assert all(((c >> r.example) & 1) == r.label for r in a.rounds)


@given(classes(max_domain=4, max_concepts=8), st.integers(0, 50))
def test_soa_mistakes_bounded_against_random_adversary(cls, seed):
    t = play_random(cls, SOALearner(), 8, seed)
    assert t.total_mistakes <= littlestone_dim(cls)
    prev = littlestone_dim(cls)
    for r in t.rounds:
        if r.loss:
            assert r.ldim_after < prev
        prev = r.ldim_after


def test_unknown_learner():
    with pytest.raises(ThicketError, match="unknown learner"):
        make_learner("oracle")
