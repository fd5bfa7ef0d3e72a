"""The realizable online mistake game: learners, the Standard Optimal Algorithm and adversaries.

Round order is always: the adversary picks an example, the learner predicts,
the adversary reveals a label consistent with some concept of the class.
"""
from __future__ import annotations

import copy
import csv
import io
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from . import caps
from .core import ConceptClass, restrict
from .dimensions import EMPTY_LDIM, littlestone_dim
from .errors import ThicketError


@dataclass(frozen=True)
class Round:
    round: int
    example: int
    prediction: int
    label: int
    loss: int
    ldim_after: int


@dataclass
class Transcript:
    rounds: list[Round] = field(default_factory=list)
    target: Optional[int] = None

    @property
    def total_mistakes(self) -> int:
        return sum(r.loss for r in self.rounds)

    def append(self, example: int, prediction: int, label: int, ldim_after: int) -> None:
        loss = abs(prediction - label)
        self.rounds.append(Round(len(self.rounds) + 1, example, prediction, label, loss, ldim_after))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["round", "example", "prediction", "label", "loss", "ldim_after"])
        for r in self.rounds:
            writer.writerow([r.round, r.example, r.prediction, r.label, r.loss, r.ldim_after])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "total_mistakes": self.total_mistakes,
            "rounds": [
                {
                    "round": r.round,
                    "example": r.example,
                    "prediction": r.prediction,
                    "label": r.label,
                    "loss": r.loss,
                    "ldim_after": r.ldim_after,
                }
                for r in self.rounds
            ],
        }


def soa_predict(version: ConceptClass, example: int) -> tuple[int, tuple[ConceptClass, ConceptClass]]:
    """Predict the side whose restriction keeps the larger Littlestone dimension (0 on ties)."""
    if version.is_empty:
        raise ThicketError("realizability violated: empty version space")
    v0 = restrict(version, example, 0)
    v1 = restrict(version, example, 1)
    pred = 1 if littlestone_dim(v1) > littlestone_dim(v0) else 0
    return pred, (v0, v1)


class Learner:
    """Base learner. Subclasses override :meth:`predict` and, if stateful, :meth:`observe`."""

    name = "learner"

    def start(self, cls: ConceptClass) -> Learner:
        self.version = cls
        return self

    def predict(self, example: int) -> int:
        raise NotImplementedError

    def observe(self, example: int, label: int) -> None:
        self.version = restrict(self.version, example, label)

    def state_key(self):
        """Hashable summary of the learner state, or None if it cannot be summarized."""
        return self.version.concepts

    def clone(self) -> Learner:
        return copy.copy(self)


class SOALearner(Learner):
    name = "soa"

    def predict(self, example):
        return soa_predict(self.version, example)[0]


class ConstantLearner(Learner):
    def __init__(self, value: int):
        self.value = value
        self.name = f"always{value}"

    def predict(self, example):
        return self.value

    def observe(self, example, label):
        pass

    def state_key(self):
        return ()


class MajorityLearner(Learner):
    """Predicts the label held by more of the version space; 0 on ties."""

    name = "majority"

    def predict(self, example):
        bit = 1 << example
        ones = sum(1 for c in self.version.concepts if c & bit)
        return 1 if 2 * ones > len(self.version) else 0


class RandomLearner(Learner):
    name = "random"

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = random.Random(seed)

    def predict(self, example):
        return self.rng.randrange(2)

    def observe(self, example, label):
        pass

    def state_key(self):
        return None

    def clone(self):
        return copy.deepcopy(self)


LEARNERS = ("soa", "always0", "always1", "majority", "random")


def make_learner(name: str, seed: int = 0) -> Learner:
    if name == "soa":
        return SOALearner()
    if name == "always0":
        return ConstantLearner(0)
    if name == "always1":
        return ConstantLearner(1)
    if name == "majority":
        return MajorityLearner()
    if name == "random":
        return RandomLearner(seed)
    raise ThicketError(f"unknown learner {name!r}; choose from {', '.join(LEARNERS)}")


def run_game(cls: ConceptClass, target: int, schedule: Sequence[int], learner: Learner) -> Transcript:
    """Play a fixed schedule with labels taken from concept ``target``."""
    if not 0 <= target < len(cls):
        raise ThicketError(f"target {target} out of range")
    concept = cls.concepts[target]
    learner.start(cls)
    version = cls
    transcript = Transcript(target=target)
    for x in schedule:
        if not 0 <= x < cls.domain_size:
            raise ThicketError(f"index out of range: example {x} in schedule")
        pred = learner.predict(x)
        y = (concept >> x) & 1
        learner.observe(x, y)
        version = restrict(version, x, y)
        transcript.append(x, pred, y, littlestone_dim(version))
    return transcript


def optimal_adversary_step(version: ConceptClass, predict: Callable[[int], int]) -> tuple[int, int]:
    """Pick the example maximizing min(Ldim(V0), Ldim(V1)), then answer against the prediction when that keeps the guarantee."""
    if version.is_empty:
        raise ThicketError("realizability violated: empty version space")
    d = littlestone_dim(version)
    best_x, best_val, sides = 0, None, None
    for x in range(version.domain_size):
        v0, v1 = restrict(version, x, 0), restrict(version, x, 1)
        val = min(littlestone_dim(v0), littlestone_dim(v1))
        if best_val is None or val > best_val:
            best_x, best_val, sides = x, val, (v0, v1)
    pred = predict(best_x)
    opposite = sides[1 - pred]
    if not opposite.is_empty and littlestone_dim(opposite) >= d - 1:
        return best_x, 1 - pred
    l0, l1 = littlestone_dim(sides[0]), littlestone_dim(sides[1])
    if l0 == l1:
        return best_x, pred
    return best_x, int(l1 > l0)


def play_adversarial(cls: ConceptClass, learner: Learner, rounds: Optional[int] = None) -> Transcript:
    """Play against the optimal adversary.

    Without ``rounds`` the game stops once the version space has dimension 0;
    with ``rounds`` play continues on forced labels.
    """
    learner.start(cls)
    version = cls
    transcript = Transcript()
    t = 0
    while (rounds is None and littlestone_dim(version) > 0) or (rounds is not None and t < rounds):
        asked = {}

        def ask(x):
            asked[x] = learner.predict(x)
            return asked[x]

        x, y = optimal_adversary_step(version, ask)
        learner.observe(x, y)
        version = restrict(version, x, y)
        transcript.append(x, asked[x], y, littlestone_dim(version))
        t += 1
    transcript.target = cls.index(min(version.concepts, key=cls.index))
    return transcript


def play_random(cls: ConceptClass, learner: Learner, rounds: int, seed: int) -> Transcript:
    """Adversary that draws examples uniformly and a uniformly random consistent label."""
    rng = random.Random(seed)
    learner.start(cls)
    version = cls
    transcript = Transcript()
    for _ in range(rounds):
        x = rng.randrange(cls.domain_size)
        pred = learner.predict(x)
        choices = [r for r in (0, 1) if not restrict(version, x, r).is_empty]
        y = rng.choice(choices)
        learner.observe(x, y)
        version = restrict(version, x, y)
        transcript.append(x, pred, y, littlestone_dim(version))
    transcript.target = cls.index(min(version.concepts, key=cls.index))
    return transcript


def _check_game_caps(cls: ConceptClass) -> None:
    limits = caps.get_caps()
    caps.check(cls.domain_size, limits.max_game_domain, "domain size")
    caps.check(len(cls), limits.max_game_concepts, "concepts")


@lru_cache(maxsize=1 << 20)
def _value(key: tuple[int, ...], n: int) -> int:
    if len(key) <= 1:
        return 0
    best = 0
    for x in range(n):
        bit = 1 << x
        ins = tuple(c for c in key if c & bit)
        if not ins or len(ins) == len(key):
            continue
        outs = tuple(c for c in key if not c & bit)
        a, b = _value(outs, n), _value(ins, n)
        # predicting 0: a mistake costs 1 + value(ins); predicting 1: 1 + value(outs)
        v = min(max(a, 1 + b), max(b, 1 + a))
        best = max(best, v)
    return best


def game_value(cls: ConceptClass) -> int:
    """Exact minimax number of forced mistakes, by full game-tree search."""
    _check_game_caps(cls)
    return _value(tuple(sorted(cls.concepts)), cls.domain_size)


@dataclass
class GameTreeReport:
    max_mistakes: float
    nodes: int
    drop_violations: int


def worst_case_mistakes(cls: ConceptClass, learner: Learner) -> GameTreeReport:
    """Maximum mistakes of ``learner`` over every adversary strategy, by exhaustive search.

    The learner's :meth:`Learner.state_key` must be a function of its full
    state. A forced round the learner gets wrong can be repeated forever, so
    the result is ``math.inf`` in that case. ``drop_violations`` counts
    mistake edges where the Littlestone dimension of the version space did not
    strictly drop.
    """
    _check_game_caps(cls)
    learner.start(cls)
    if learner.state_key() is None:
        raise ThicketError(f"learner {learner.name!r} cannot be searched exhaustively")
    memo: dict = {}
    stats = {"nodes": 0, "drops": 0}

    def search(version: ConceptClass, lrn: Learner) -> float:
        k = (version.concepts, lrn.state_key())
        if k in memo:
            return memo[k]
        stats["nodes"] += 1
        d = littlestone_dim(version)
        best = 0.0
        for x in range(cls.domain_size):
            pred = lrn.predict(x)
            for y in (0, 1):
                child = restrict(version, x, y)
                if child.is_empty:
                    continue
                mistake = int(pred != y)
                if len(child) == len(version):
                    if mistake:
                        best = math.inf
                    continue
                if mistake and littlestone_dim(child) >= d:
                    stats["drops"] += 1
                nxt = lrn.clone()
                nxt.observe(x, y)
                best = max(best, mistake + search(child, nxt))
        memo[k] = best
        return best

    value = search(cls, learner.clone())
    return GameTreeReport(value, stats["nodes"], stats["drops"])


__all__ = [
    "EMPTY_LDIM",
    "GameTreeReport",
    "Learner",
    "LEARNERS",
    "Round",
    "Transcript",
    "game_value",
    "make_learner",
    "optimal_adversary_step",
    "play_adversarial",
    "play_random",
    "run_game",
    "soa_predict",
    "worst_case_mistakes",
]
