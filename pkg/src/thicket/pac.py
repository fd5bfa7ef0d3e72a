"""PAC learning at desk scale: a consistent learner, exact error mass and the sample-complexity bound."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ConceptClass, LabeledExample, bits
from .dimensions import vc_dim
from .errors import ThicketError

MIN_TRIALS = 100


@dataclass(frozen=True)
class Distribution:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(v) for v in self.probabilities)
        object.__setattr__(self, "probabilities", p)
        if not p:
            raise ThicketError("distribution needs at least one point")
        if any(v < 0 for v in p):
            raise ThicketError("probabilities must be non-negative")
        if abs(math.fsum(p) - 1) > 1e-12:
            raise ThicketError(f"probabilities must sum to 1 (got {math.fsum(p)!r})")

    @classmethod
    def uniform(cls, n: int) -> Distribution:
        return cls((1 / n,) * n)

    def mass(self, mask: int) -> float:
        return math.fsum(self.probabilities[x] for x in bits(mask))


@dataclass(frozen=True)
class PacResult:
    epsilon: float
    delta: float
    sample_size: int
    trials: int
    failure_fraction: float
    mean_error: float
    std_error: float
    vc_dim: int

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "sample_size": self.sample_size,
            "trials": self.trials,
            "failure_fraction": self.failure_fraction,
            "mean_error": self.mean_error,
            "std_error": self.std_error,
            "vc_dim": self.vc_dim,
            "expected_error_bound": self.delta + self.epsilon * (1 - self.delta),
        }


def consistent_learner(cls: ConceptClass, sample: Sequence[LabeledExample]) -> int:
    """Index of the first concept agreeing with every labeled example."""
    pos = neg = 0
    for s in sample:
        if not 0 <= s.example < cls.domain_size:
            raise ThicketError(f"index out of range: example {s.example}")
        if s.label:
            pos |= 1 << s.example
        else:
            neg |= 1 << s.example
    return _first_consistent(cls, pos, neg)


def _first_consistent(cls: ConceptClass, pos: int, neg: int) -> int:
    for i, c in enumerate(cls.concepts):
        if c & pos == pos and not c & neg:
            return i
    raise ThicketError("no consistent concept: the sample is not realizable by the class")


def err(cls: ConceptClass, hypothesis: int, target: int, mu: Distribution) -> float:
    """mu-mass of the symmetric difference of two concepts."""
    if len(mu.probabilities) != cls.domain_size:
        raise ThicketError("distribution size does not match the domain")
    return mu.mass(cls.concepts[hypothesis] ^ cls.concepts[target])


def sample_complexity(epsilon: float, delta: float, d: int) -> int:
    """ceil(max(4/eps log2(2/delta), 8d/eps log2(13/eps)))."""
    if not 0 < epsilon < 1:
        raise ThicketError("epsilon must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ThicketError("delta must lie in (0, 1)")
    if d < 1:
        raise ThicketError("VC dimension must be at least 1")
    first = 4 / epsilon * math.log2(2 / delta)
    second = 8 * d / epsilon * math.log2(13 / epsilon)
    return math.ceil(max(first, second))


def pac_experiment(
    cls: ConceptClass,
    target: int,
    mu: Distribution,
    epsilon: float,
    delta: float,
    trials: int,
    seed: int,
    jobs: int = 1,
    sample_size: Optional[int] = None,
) -> PacResult:
    """Estimate the failure probability of the consistent learner at the bound's sample size.

    A class of VC dimension 0 is run at the ``d = 1`` sample size.
    """
    if trials < MIN_TRIALS:
        raise ThicketError(f"trials must be ≥ {MIN_TRIALS}")
    if not 0 <= target < len(cls):
        raise ThicketError(f"target {target} out of range")
    if len(mu.probabilities) != cls.domain_size:
        raise ThicketError("distribution size does not match the domain")
    d = vc_dim(cls)
    n = sample_size if sample_size is not None else sample_complexity(epsilon, delta, max(d, 1))
    concept = cls.concepts[target]
    p = np.asarray(mu.probabilities)
    p = p / p.sum()

    def trial(i: int) -> float:
        rng = np.random.default_rng([seed, i])
        drawn = np.unique(rng.choice(cls.domain_size, size=n, p=p))
        seen = sum(1 << int(x) for x in drawn)
        h = _first_consistent(cls, concept & seen, seen & ~concept)
        return err(cls, h, target, mu)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            errors = list(ex.map(trial, range(trials)))
    else:
        errors = [trial(i) for i in range(trials)]
    errors = np.array(errors)
    return PacResult(
        epsilon=epsilon,
        delta=delta,
        sample_size=n,
        trials=trials,
        failure_fraction=float((errors > epsilon).mean()),
        mean_error=float(errors.mean()),
        std_error=float(errors.std(ddof=1)),
        vc_dim=d,
    )
