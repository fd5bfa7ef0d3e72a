"""Online prediction under bounded stochastic label noise.

Labels are the target's labels, each flipped independently with probability
exactly ``gamma``. The learner is a weighted vote over the agnostic expert
pool with ``eta = ln((1 - gamma) / gamma)``, the log-likelihood ratio of a
single flip, so the weights are the posterior over experts under the noise
model. Each expert also carries a prior weight ``FLIP_PRIOR ** |flips|``.
At ``gamma = 0`` the weights become elimination; every surviving expert
agrees with SOA on the past, and the prior tips the vote to SOA's side on
every round (a flat prior ties on the last round), so the deterministic vote
reproduces SOA on the clean labels.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import ConceptClass
from .dimensions import littlestone_dim
from .errors import ThicketError
from .experts import advice_matrix, agnostic_experts

LEARNERS = ("map", "randomized")
FLIP_PRIOR = 0.5


def _check_gamma(gamma: float) -> None:
    if not 0 <= gamma < 0.5:
        raise ThicketError("noise rate must be below one half (and non-negative)")


@dataclass(frozen=True)
class NoiseModel:
    concept: int
    gamma: float
    seed: int

    def __post_init__(self):
        _check_gamma(self.gamma)

    @classmethod
    def for_class(cls, concepts: ConceptClass, target: int, gamma: float, seed: int) -> NoiseModel:
        if not 0 <= target < len(concepts):
            raise ThicketError(f"target {target} out of range")
        return cls(concepts.concepts[target], gamma, seed)

    def clean_labels(self, schedule: Sequence[int]) -> np.ndarray:
        return np.array([(self.concept >> x) & 1 for x in schedule], dtype=np.int8)


def noisy_labels(model: NoiseModel, schedule: Sequence[int], rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Target labels XOR independent Bernoulli(gamma) flips."""
    _check_gamma(model.gamma)
    if rng is None:
        rng = np.random.default_rng(model.seed)
    flips = rng.random(len(schedule)) < model.gamma
    return model.clean_labels(schedule) ^ flips.astype(np.int8)


def noise_bound(d: int, horizon: int, gamma: float) -> float:
    """Ldim * ln(T) / (1 - 2 sqrt(gamma (1 - gamma)))."""
    if gamma >= 0.5:
        raise ThicketError("noise rate must be below one half: the bound divides by zero at 1/2")
    _check_gamma(gamma)
    if horizon < 2:
        raise ThicketError("horizon must be at least 2")
    return d * math.log(horizon) / (1 - 2 * math.sqrt(gamma * (1 - gamma)))


def noise_eta(gamma: float) -> float:
    _check_gamma(gamma)
    return math.inf if gamma == 0 else math.log((1 - gamma) / gamma)


def round_robin(domain_size: int, horizon: int) -> list[int]:
    return [t % domain_size for t in range(horizon)]


def random_schedule(domain_size: int, horizon: int, seed: int) -> list[int]:
    return np.random.default_rng(seed).integers(0, domain_size, size=horizon).tolist()


@dataclass
class NoisyReport:
    horizon: int
    trials: int
    gamma: float
    ldim: int
    learner: str
    mean_disagreement: float
    std_disagreement: float
    mean_noisy_loss: float
    bound: float
    per_trial: list[int] = field(default_factory=list)

    @property
    def ratio(self) -> Optional[float]:
        return self.mean_disagreement / self.bound if self.bound > 0 else None

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "trials": self.trials,
            "gamma": self.gamma,
            "ldim": self.ldim,
            "learner": self.learner,
            "mean_disagreement": self.mean_disagreement,
            "std_disagreement": self.std_disagreement,
            "mean_noisy_loss": self.mean_noisy_loss,
            "bound": self.bound,
            "ratio": self.ratio,
        }


def _simulate(
    advice: np.ndarray, labels: np.ndarray, eta: float, coins: Optional[np.ndarray], prior: Optional[np.ndarray] = None
) -> np.ndarray:
    """Predictions ``(B, T)`` of the weighted vote for a batch of label sequences."""
    b, t_len = labels.shape
    n = advice.shape[1]
    mistakes = np.zeros((b, n))
    preds = np.zeros((b, t_len), dtype=np.int8)
    for t in range(t_len):
        rel = mistakes - mistakes.min(axis=1, keepdims=True)
        w = (rel == 0).astype(float) if math.isinf(eta) else np.exp(-eta * rel)
        if prior is not None:
            w = w * prior
        f = advice[t]
        ones = w @ f
        total = w.sum(axis=1)
        if coins is None:
            preds[:, t] = 2 * ones > total
        else:
            preds[:, t] = coins[:, t] < ones / total
        mistakes += f[None, :] != labels[:, t : t + 1]
    return preds


def noisy_run(
    cls: ConceptClass,
    model: NoiseModel,
    schedule: Sequence[int],
    trials: int,
    learner: str = "map",
    learner_seed: Optional[int] = None,
    jobs: int = 1,
) -> NoisyReport:
    """Mean disagreement with the clean target over independent noisy trials.

    Trial ``i`` draws its noise from ``(model.seed, i)`` and, for the
    randomized learner, its coins from ``(learner_seed, i)``, so results do not
    depend on ``jobs``.
    """
    if trials < 1:
        raise ThicketError("trials must be at least 1")
    if learner not in LEARNERS:
        raise ThicketError(f"unknown noisy learner {learner!r}; choose from {', '.join(LEARNERS)}")
    horizon = len(schedule)
    if horizon < 2:
        raise ThicketError("horizon must be at least 2")
    if learner_seed is None:
        learner_seed = model.seed + 1
    d = littlestone_dim(cls)
    pool = agnostic_experts(cls, horizon)
    advice = advice_matrix(pool, schedule).astype(float)
    eta = noise_eta(model.gamma)
    prior = np.array([FLIP_PRIOR ** len(e.flips) for e in pool.experts])
    clean = model.clean_labels(schedule)

    def run_chunk(indices):
        labels = np.stack([noisy_labels(model, schedule, np.random.default_rng([model.seed, i])) for i in indices])
        coins = None
        if learner == "randomized":
            coins = np.stack([np.random.default_rng([learner_seed, i]).random(horizon) for i in indices])
        preds = _simulate(advice, labels, eta, coins, prior)
        return (preds != clean[None, :]).sum(axis=1), (preds != labels).sum(axis=1)

    chunks = [list(range(trials))[k::jobs] for k in range(jobs)] if jobs > 1 else [list(range(trials))]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_chunk, chunks))
    else:
        results = [run_chunk(chunks[0])]
    disagree = np.zeros(trials, dtype=np.int64)
    noisy = np.zeros(trials, dtype=np.int64)
    for idx, (dis, nl) in zip(chunks, results):
        disagree[idx] = dis
        noisy[idx] = nl
    return NoisyReport(
        horizon=horizon,
        trials=trials,
        gamma=model.gamma,
        ldim=d,
        learner=learner,
        mean_disagreement=float(disagree.mean()),
        std_disagreement=float(disagree.std(ddof=1)) if trials > 1 else 0.0,
        mean_noisy_loss=float(noisy.mean()),
        bound=noise_bound(d, horizon, model.gamma),
        per_trial=disagree.tolist(),
    )
