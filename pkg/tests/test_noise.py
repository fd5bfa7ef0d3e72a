import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import classes
from thicket import ConceptClass, ThicketError, littlestone_dim
from thicket.game import SOALearner, run_game
from thicket.noise import (
    NoiseModel,
    noise_bound,
    noise_eta,
    noisy_labels,
    noisy_run,
    random_schedule,
    round_robin,
)
from thicket.zoo import singletons, thresholds


def test_noiseless_labels_equal_target():
    model = NoiseModel(0b1011, 0.0, 3)
    schedule = round_robin(4, 40)
    assert (noisy_labels(model, schedule) == model.clean_labels(schedule)).all()


def test_flip_fraction_concentrates():
    model = NoiseModel(0b1, 0.25, 17)
    schedule = round_robin(1, 10_000)
    flips = (noisy_labels(model, schedule) != model.clean_labels(schedule)).mean()
    sigma = math.sqrt(0.25 * 0.75 / 10_000)
    assert abs(flips - 0.25) <= 3 * sigma


def test_labels_replay_with_seed():
    model = NoiseModel(0b110, 0.3, 99)
    schedule = random_schedule(3, 50, 1)
    assert (noisy_labels(model, schedule) == noisy_labels(model, schedule)).all()


def test_gamma_validation():
    with pytest.raises(ThicketError):
        NoiseModel(0, 0.5, 0)
    with pytest.raises(ThicketError):
        NoiseModel(0, -0.1, 0)
    with pytest.raises(ThicketError):
        NoiseModel.for_class(singletons(3), 3, 0.1, 0)


def test_noise_bound_spot_values():
    assert noise_bound(3, 50, 0.0) == pytest.approx(3 * math.log(50), abs=1e-12)
    assert noise_bound(2, 20, 0.0) == pytest.approx(5.991464547107982, abs=1e-9)
    assert noise_bound(1, 100, 0.25) == pytest.approx(math.log(100) / (1 - 2 * math.sqrt(0.1875)), abs=1e-9)
    assert noise_bound(1, 100, 0.25) == pytest.approx(34.37, abs=0.01)
    with pytest.raises(ThicketError, match="one half"):
        noise_bound(1, 10, 0.5)
    with pytest.raises(ThicketError):
        noise_bound(1, 1, 0.1)


def test_noise_bound_monotone():
    grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.49]
    for d in (1, 2, 3):
        for t in (2, 10, 100):
            vals = [noise_bound(d, t, g) for g in grid]
            assert vals == sorted(vals)
            assert noise_bound(d + 1, t, 0.2) > noise_bound(d, t, 0.2)
            assert noise_bound(d, t + 1, 0.2) > noise_bound(d, t, 0.2)


def test_eta_is_elimination_at_zero():
    assert noise_eta(0.0) == math.inf
    assert noise_eta(0.25) == pytest.approx(math.log(3))


def test_zero_noise_reproduces_soa():
    cls = thresholds(4)
    schedule = random_schedule(4, 12, 5)
    for target in range(len(cls)):
        model = NoiseModel.for_class(cls, target, 0.0, 1)
        report = noisy_run(cls, model, schedule, 3)
        soa = run_game(cls, target, schedule, SOALearner()).total_mistakes
        assert report.per_trial == [soa] * 3
        assert max(report.per_trial) <= report.ldim


def test_single_concept_never_disagrees():
    cls = ConceptClass(3, (0b101,))
    report = noisy_run(cls, NoiseModel.for_class(cls, 0, 0.4, 2), round_robin(3, 30), 20)
    assert report.mean_disagreement == 0
    assert report.mean_noisy_loss > 0


def test_jobs_do_not_change_results():
    cls = singletons(4)
    model = NoiseModel.for_class(cls, 1, 0.2, 8)
    schedule = round_robin(4, 30)
    a = noisy_run(cls, model, schedule, 17, learner="randomized")
    b = noisy_run(cls, model, schedule, 17, learner="randomized", jobs=4)
    assert a.per_trial == b.per_trial
    assert a.to_json() == b.to_json()


def test_swapping_seeds_keeps_means_within_noise():
    cls = singletons(4)
    schedule = round_robin(4, 40)
    a = noisy_run(cls, NoiseModel.for_class(cls, 0, 0.25, 1), schedule, 300, learner="randomized", learner_seed=2)
    b = noisy_run(cls, NoiseModel.for_class(cls, 0, 0.25, 2), schedule, 300, learner="randomized", learner_seed=1)
    sigma = math.hypot(a.std_disagreement, b.std_disagreement) / math.sqrt(300)
    assert abs(a.mean_disagreement - b.mean_disagreement) <= 3 * sigma


def test_report_fields():
    cls = singletons(3)
    report = noisy_run(cls, NoiseModel.for_class(cls, 0, 0.1, 4), round_robin(3, 9), 5)
    data = report.to_json()
    assert data["bound"] == pytest.approx(noise_bound(1, 9, 0.1))
    assert data["ratio"] == pytest.approx(report.mean_disagreement / report.bound)
    assert len(report.per_trial) == 5


def test_run_validation():
    cls = singletons(3)
    model = NoiseModel.for_class(cls, 0, 0.1, 4)
    with pytest.raises(ThicketError):
        noisy_run(cls, model, [0], 5)
    with pytest.raises(ThicketError):
        noisy_run(cls, model, [0, 1], 0)
    with pytest.raises(ThicketError):
        noisy_run(cls, model, [0, 1], 5, learner="oracle")


def test_randomized_learner_replays_with_its_seed():
    cls = thresholds(3)
    schedule = round_robin(3, 9)
    model = NoiseModel.for_class(cls, 2, 0.1, 3)
    a = noisy_run(cls, model, schedule, 40, learner="randomized", learner_seed=5)
    b = noisy_run(cls, model, schedule, 40, learner="randomized", learner_seed=5)
    c = noisy_run(cls, model, schedule, 40, learner="randomized", learner_seed=6)
    assert a.per_trial == b.per_trial
    assert a.per_trial != c.per_trial


@settings(max_examples=40)
@given(classes(max_domain=4, max_concepts=8), st.data())
def test_zero_noise_map_learner_is_soa(cls, data):
    if littlestone_dim(cls) > 2:
        return
    target = data.draw(st.integers(0, len(cls) - 1))
    schedule = data.draw(st.lists(st.integers(0, cls.domain_size - 1), min_size=2, max_size=7))
    report = noisy_run(cls, NoiseModel.for_class(cls, target, 0.0, 0), schedule, 2)
    soa = run_game(cls, target, schedule, SOALearner()).total_mistakes
    assert report.per_trial == [soa, soa]
    assert soa <= report.ldim
