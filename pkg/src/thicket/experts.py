"""Randomized weighted majority over a finite pool of experts, with exact expected-loss accounting.

Weights are never stored as floats that drift: the pool keeps each expert's
integer mistake count ``m_i`` and every probability is computed from
``exp(-eta * (m_i - min m))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import caps
from .core import ConceptClass
from .dimensions import littlestone_dim
from .errors import ThicketError
from .game import soa_predict


@dataclass(frozen=True)
class BitExpert:
    """Expert whose advice is a fixed concept mask."""

    mask: int

    def predict(self, example: int) -> int:
        return (self.mask >> example) & 1

    def advance(self, example: int) -> BitExpert:
        return self


@lru_cache(maxsize=1 << 18)
def _soa_step(version: ConceptClass, example: int):
    pred, sides = soa_predict(version, example)
    return pred, sides


@dataclass(frozen=True)
class SOAExpert:
    """Simulated SOA that contradicts itself on the rounds in ``flips``.

    The version space is advanced with the expert's own prediction as the
    label, so the advice depends on the instances but never on the true labels.
    An expert whose version space runs empty predicts 0 from then on.
    """

    version: ConceptClass
    flips: frozenset[int]
    t: int = 0

    def predict(self, example: int) -> int:
        if self.version.is_empty:
            return 0
        pred = _soa_step(self.version, example)[0]
        return 1 - pred if self.t in self.flips else pred

    def advance(self, example: int) -> SOAExpert:
        if self.version.is_empty:
            return SOAExpert(self.version, self.flips, self.t + 1)
        pred, sides = _soa_step(self.version, example)
        if self.t in self.flips:
            pred = 1 - pred
        return SOAExpert(sides[pred], self.flips, self.t + 1)


@dataclass(frozen=True)
class ExpertPool:
    experts: tuple
    eta: float
    mistakes: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.experts:
            raise ThicketError("expert pool is empty")
        if not self.eta >= 0:
            raise ThicketError("learning rate must be non-negative")
        if not self.mistakes:
            object.__setattr__(self, "mistakes", (0,) * len(self.experts))
        if len(self.mistakes) != len(self.experts):
            raise ThicketError("one mistake count per expert")

    def __len__(self) -> int:
        return len(self.experts)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(-self.eta * np.asarray(self.mistakes, dtype=float))

    def relative_weights(self) -> np.ndarray:
        m = np.asarray(self.mistakes, dtype=float)
        return np.exp(-self.eta * (m - m.min()))

    def advice(self, example: int) -> np.ndarray:
        return np.array([e.predict(example) for e in self.experts], dtype=np.int8)

    @classmethod
    def from_class(cls, concepts: ConceptClass, eta: float) -> ExpertPool:
        return cls(tuple(BitExpert(c) for c in concepts.concepts), eta)


def wm_probability(pool: ExpertPool, example: int) -> float:
    """Probability that weighted majority predicts 1 on ``example``."""
    w = pool.relative_weights()
    f = pool.advice(example)
    return math.fsum(w[f == 1]) / math.fsum(w)


def wm_update(pool: ExpertPool, example: int, label: int) -> ExpertPool:
    """Charge every wrong expert one mistake (its weight drops by exp(-eta)) and advance all experts."""
    mistakes = tuple(m + (e.predict(example) != label) for m, e in zip(pool.mistakes, pool.experts))
    experts = tuple(e.advance(example) for e in pool.experts)
    return ExpertPool(experts, pool.eta, mistakes)


@dataclass
class RegretLedger:
    round_probabilities: list[float] = field(default_factory=list)
    round_losses: list[float] = field(default_factory=list)
    expert_losses: list[int] = field(default_factory=list)
    realized_predictions: Optional[list[int]] = None
    realized_loss: Optional[int] = None

    @property
    def horizon(self) -> int:
        return len(self.round_losses)

    @property
    def expected_loss(self) -> float:
        return math.fsum(self.round_losses)

    @property
    def best_expert_loss(self) -> int:
        return min(self.expert_losses)

    @property
    def regret(self) -> float:
        return self.expected_loss - self.best_expert_loss

    def bound(self) -> float:
        return finite_regret_bound(len(self.expert_losses), self.horizon)

    def to_json(self) -> dict:
        out = {
            "expected_loss": self.expected_loss,
            "best_expert_loss": self.best_expert_loss,
            "regret": self.regret,
            "horizon": self.horizon,
            "experts": len(self.expert_losses),
            "round_probabilities": self.round_probabilities,
        }
        if self.realized_predictions is not None:
            out["realized_predictions"] = self.realized_predictions
            out["realized_loss"] = self.realized_loss
        return out


def wm_run(pool: ExpertPool, sequence: Sequence[tuple[int, int]], seed: Optional[int] = None) -> RegretLedger:
    """Run weighted majority over ``(example, label)`` pairs, accounting expected loss exactly.

    With ``seed`` the realized coin flips are also drawn (they do not affect
    the expected loss or the weights).
    """
    ledger = RegretLedger()
    rng = np.random.default_rng(seed) if seed is not None else None
    if rng is not None:
        ledger.realized_predictions = []
    for x, y in sequence:
        p = wm_probability(pool, x)
        ledger.round_probabilities.append(p)
        ledger.round_losses.append(abs(p - y))
        if rng is not None:
            ledger.realized_predictions.append(int(rng.random() < p))
        pool = wm_update(pool, x, y)
    ledger.expert_losses = list(pool.mistakes)
    if rng is not None:
        ledger.realized_loss = sum(int(p != y) for p, (_, y) in zip(ledger.realized_predictions, sequence))
    return ledger


def tuned_eta(n_experts: int, horizon: int) -> float:
    """Horizon-tuned learning rate sqrt(8 ln N / T); 1 for a single expert."""
    if n_experts < 1:
        raise ThicketError("need at least one expert")
    if horizon < 1:
        raise ThicketError("horizon must be at least 1")
    if n_experts == 1:
        return 1.0
    return math.sqrt(8 * math.log(n_experts) / horizon)


def finite_regret_bound(n_experts: int, horizon: int) -> float:
    return math.sqrt(0.5 * math.log(n_experts) * horizon)


def agnostic_regret_bound(ldim: int, horizon: int) -> float:
    return math.sqrt(0.5 * ldim * horizon * math.log(horizon)) if horizon >= 1 else 0.0


def lower_regret_bound(ldim: int, horizon: int) -> float:
    """The sqrt(Ldim T / 8) lower bound; reported for context only."""
    return math.sqrt(ldim * horizon / 8)


def agnostic_pool_size(ldim: int, horizon: int) -> int:
    return sum(math.comb(horizon, k) for k in range(min(ldim, horizon) + 1))


def agnostic_experts(cls: ConceptClass, horizon: int, eta: Optional[float] = None) -> ExpertPool:
    """One SOA-simulating expert per set of at most Ldim rounds on which it flips SOA's advice.

    Experts are ordered by flip-set size, then lexicographically.
    """
    if horizon < 1:
        raise ThicketError("horizon must be at least 1")
    d = littlestone_dim(cls)
    size = agnostic_pool_size(d, horizon)
    caps.check(size, caps.get_caps().max_experts, "agnostic expert pool size")
    experts = [
        SOAExpert(cls, frozenset(flips))
        for k in range(min(d, horizon) + 1)
        for flips in combinations(range(horizon), k)
    ]
    if eta is None:
        eta = tuned_eta(len(experts), horizon)
    return ExpertPool(tuple(experts), eta)


def advice_matrix(pool: ExpertPool, schedule: Sequence[int]) -> np.ndarray:
    """``(T, N)`` matrix of expert advice along an instance schedule.

    Valid because no expert reads the true labels.
    """
    experts = list(pool.experts)
    rows = []
    for x in schedule:
        rows.append([e.predict(x) for e in experts])
        experts = [e.advance(x) for e in experts]
    return np.array(rows, dtype=np.int8).reshape(len(rows), len(experts))


def batch_expected_loss(advice: np.ndarray, labels: np.ndarray, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized weighted majority.

    ``advice`` is ``(T, N)`` or ``(B, T, N)``; ``labels`` is ``(B, T)``.
    Returns the learner's exact expected loss ``(B,)`` and expert losses ``(B, N)``.
    """
    labels = np.asarray(labels, dtype=np.int8)
    b, t_len = labels.shape
    advice = np.asarray(advice, dtype=np.int8)
    if advice.ndim == 2:
        advice = np.broadcast_to(advice, (b,) + advice.shape)
    n = advice.shape[2]
    mistakes = np.zeros((b, n))
    loss = np.zeros(b)
    for t in range(t_len):
        w = np.exp(-eta * (mistakes - mistakes.min(axis=1, keepdims=True)))
        f = advice[:, t, :]
        p = (w * f).sum(axis=1) / w.sum(axis=1)
        y = labels[:, t]
        loss += np.abs(p - y)
        mistakes += f != y[:, None]
    return loss, mistakes.astype(np.int64)
