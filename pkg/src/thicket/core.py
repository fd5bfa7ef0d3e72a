"""Finite concept classes, binary element trees and the well-labeling predicate.

Examples are the dense indices ``0..n-1``. A concept is stored as a packed
integer bitmask: bit ``x`` is set iff example ``x`` belongs to the concept.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ThicketError


def bits(mask: int):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class ConceptClass:
    domain_size: int
    concepts: tuple[int, ...]
    dedup_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if not isinstance(self.domain_size, int) or self.domain_size < 1:
            raise ThicketError(f"domain_size must be a positive integer, got {self.domain_size!r}")
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if not self.concepts:
            raise ThicketError("empty class")
        limit = 1 << self.domain_size
        for i, c in enumerate(self.concepts):
            if not 0 <= c < limit:
                raise ThicketError(f"concept {i} has members outside the domain of size {self.domain_size}")
        if len(set(self.concepts)) != len(self.concepts):
            raise ThicketError("duplicate concepts")

    @classmethod
    def empty(cls, domain_size: int) -> ConceptClass:
        """The distinguished empty class. Only restriction produces it."""
        return cls._trusted(domain_size, ())

    @classmethod
    def _trusted(cls, domain_size: int, concepts: tuple[int, ...]) -> ConceptClass:
        # skips validation; callers guarantee distinct in-range masks
        obj = object.__new__(cls)
        object.__setattr__(obj, "domain_size", domain_size)
        object.__setattr__(obj, "concepts", concepts)
        object.__setattr__(obj, "dedup_count", 0)
        return obj

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    @property
    def is_empty(self) -> bool:
        return not self.concepts

    def contains(self, concept: int, example: int) -> int:
        return (self.concepts[concept] >> example) & 1

    def index(self, mask: int) -> int:
        return self.concepts.index(mask)

    def to_sets(self) -> list[set[int]]:
        return [set(bits(c)) for c in self.concepts]

    def to_bitstrings(self) -> list[str]:
        n = self.domain_size
        return ["".join("1" if (c >> x) & 1 else "0" for x in range(n)) for c in self.concepts]

    def matrix(self) -> list[list[int]]:
        """Membership matrix with one row per concept and one column per example."""
        n = self.domain_size
        return [[(c >> x) & 1 for x in range(n)] for c in self.concepts]

    def to_json(self) -> dict:
        return {"domain_size": self.domain_size, "concepts": self.to_bitstrings()}

    @classmethod
    def from_json(cls, data: dict) -> ConceptClass:
        try:
            n = data["domain_size"]
            strings = data["concepts"]
        except (KeyError, TypeError):
            raise ThicketError('concept class JSON needs "domain_size" and "concepts"') from None
        if not isinstance(n, int) or n < 1:
            raise ThicketError(f"domain_size must be a positive integer, got {n!r}")
        masks = []
        seen = {}
        for i, s in enumerate(strings):
            if not isinstance(s, str) or len(s) != n:
                raise ThicketError(f"concept {i} has wrong length: expected a bit-string of length {n}")
            if set(s) - {"0", "1"}:
                raise ThicketError(f"concept {i} is not a bit-string: {s!r}")
            mask = sum(1 << x for x, ch in enumerate(s) if ch == "1")
            if mask in seen:
                raise ThicketError(f"duplicate concept: {i} repeats concept {seen[mask]}")
            seen[mask] = i
            masks.append(mask)
        return cls(n, tuple(masks))


def mask_of(members: Iterable[int]) -> int:
    m = 0
    for x in members:
        m |= 1 << x
    return m


def class_from_sets(domain_size: int, sets: Sequence[Iterable[int]]) -> ConceptClass:
    """Build a class from example-index sets, dropping repeats (first occurrence wins)."""
    if not sets:
        raise ThicketError("empty class")
    masks: dict[int, None] = {}
    for i, s in enumerate(sets):
        s = list(s)
        for x in s:
            if not 0 <= x < domain_size:
                raise ThicketError(f"index out of range: set {i} {sorted(s)} contains {x} (domain size {domain_size})")
        masks.setdefault(mask_of(s), None)
    return ConceptClass(domain_size, tuple(masks), dedup_count=len(sets) - len(masks))


@dataclass(frozen=True)
class LabeledExample:
    example: int
    label: int


@dataclass(frozen=True)
class BinaryElementTree:
    """Complete binary tree in heap order: node ``i`` has children ``2i+1`` (left) and ``2i+2`` (right).

    Leaves are numbered ``0..2**height - 1`` from left to right.
    """

    height: int
    internal_labels: tuple[int, ...]
    leaf_labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "internal_labels", tuple(self.internal_labels))
        object.__setattr__(self, "leaf_labels", tuple(self.leaf_labels))
        if self.height < 0:
            raise ThicketError("tree height must be non-negative")
        if len(self.internal_labels) != (1 << self.height) - 1:
            raise ThicketError(f"a height-{self.height} tree needs {(1 << self.height) - 1} internal labels")
        if len(self.leaf_labels) != 1 << self.height:
            raise ThicketError(f"a height-{self.height} tree needs {1 << self.height} leaf labels")

    def validate(self, cls: ConceptClass) -> None:
        for a in self.internal_labels:
            if not 0 <= a < cls.domain_size:
                raise ThicketError(f"internal label {a} is not an example of the class")
        for c in self.leaf_labels:
            if not 0 <= c < len(cls):
                raise ThicketError(f"leaf label {c} is not a concept of the class")

    def path(self, leaf: int) -> list[tuple[int, int]]:
        """Root-to-leaf list of ``(example, went_left)`` pairs."""
        if not 0 <= leaf < len(self.leaf_labels):
            raise ThicketError(f"leaf index {leaf} out of range")
        node, out = 0, []
        for depth in range(self.height):
            left = not (leaf >> (self.height - 1 - depth)) & 1
            out.append((self.internal_labels[node], int(left)))
            node = 2 * node + (1 if left else 2)
        return out

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "internal_labels": list(self.internal_labels),
            "leaf_labels": list(self.leaf_labels),
        }


def is_well_labeled(cls: ConceptClass, tree: BinaryElementTree, leaf: int) -> int:
    """1 iff every internal label ``a`` on the leaf's path satisfies: ``a`` in the leaf concept exactly when the path turns left at ``a``."""
    tree.validate(cls)
    path = tree.path(leaf)
    concept = cls.concepts[tree.leaf_labels[leaf]]
    for a, left in path:
        if (concept >> a) & 1 != left:
            return 0
    return 1


def restrict(cls: ConceptClass, example: int, label: int) -> ConceptClass:
    """Concepts ``c`` with ``c[example] == label``; may be the empty class."""
    if not 0 <= example < cls.domain_size:
        raise ThicketError(f"index out of range: example {example} (domain size {cls.domain_size})")
    bit = 1 << example
    want = bit if label else 0
    kept = tuple(c for c in cls.concepts if c & bit == want)
    return ConceptClass._trusted(cls.domain_size, kept)
