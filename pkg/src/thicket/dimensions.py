"""Exact VC dimension, Littlestone dimension, thicket shatter function and Shelah 2-rank.

The recursions are memoized on canonical (sorted) tuples of concept masks.
``functools.lru_cache`` guards its table internally, so these functions may be
called from several threads at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from . import caps
from .core import BinaryElementTree, ConceptClass, bits, popcount
from .errors import ThicketError

EMPTY_LDIM = -1


def _key(cls: ConceptClass) -> tuple[int, ...]:
    return tuple(sorted(cls.concepts))


def _split(key: tuple[int, ...], x: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    bit = 1 << x
    ins = tuple(c for c in key if c & bit)
    outs = tuple(c for c in key if not c & bit)
    return ins, outs


def _disagreement(key: tuple[int, ...]) -> int:
    """Mask of the examples on which the concepts of ``key`` do not all agree."""
    union, inter = 0, -1
    for c in key:
        union |= c
        inter &= c
    return union & ~inter


def vc_dim(cls: ConceptClass) -> int:
    """Size of the largest shattered subset of the domain.

    Shattered sets are closed under taking subsets, so they are grown level by
    level; there are at most ``len(cls)`` of them, which keeps this cheap even
    on large domains.
    """
    if cls.is_empty:
        raise ThicketError("vc_dim of the empty class is undefined")
    n = cls.domain_size
    level = [0]
    d = 0
    while level and (1 << (d + 1)) <= len(cls):
        nxt = []
        for s in level:
            start = s.bit_length()
            for x in range(start, n):
                t = s | (1 << x)
                if len({c & t for c in cls.concepts}) == 1 << (d + 1):
                    nxt.append(t)
        if not nxt:
            break
        level = nxt
        d += 1
    return d


@lru_cache(maxsize=1 << 20)
def _ldim(key: tuple[int, ...]) -> int:
    size = len(key)
    if size == 0:
        return EMPTY_LDIM
    if size == 1:
        return 0
    upper = size.bit_length() - 1
    best = 0
    for x in bits(_disagreement(key)):
        ins, outs = _split(key, x)
        small, big = (ins, outs) if len(ins) <= len(outs) else (outs, ins)
        if len(small) < 1 << best:
            continue
        v = _ldim(small)
        if v < best:
            continue
        v = 1 + min(v, _ldim(big))
        if v > best:
            best = v
            if best == upper:
                break
    return best


def littlestone_dim(cls: ConceptClass) -> int:
    """Littlestone dimension via the version-space recursion; -1 for the empty class."""
    return _ldim(_key(cls))


def ldim_of_masks(masks) -> int:
    return _ldim(tuple(sorted(set(masks))))


@dataclass(frozen=True)
class ShatterReport:
    height: int
    max_well_labeled: int
    witness_tree: Optional[BinaryElementTree] = None

    def to_json(self) -> dict:
        return {
            "height": self.height,
            "max_well_labeled": self.max_well_labeled,
            "witness_tree": self.witness_tree.to_json() if self.witness_tree else None,
        }


@lru_cache(maxsize=1 << 20)
def _rho(key: tuple[int, ...], h: int) -> int:
    size = len(key)
    if size == 0:
        return 0
    if h == 0 or size == 1:
        return 1
    cap = min(size, 1 << h)
    best = 0
    for x in bits(_disagreement(key)):
        ins, outs = _split(key, x)
        if min(len(ins), 1 << (h - 1)) + min(len(outs), 1 << (h - 1)) <= best:
            continue
        v = _rho(ins, h - 1) + _rho(outs, h - 1)
        if v > best:
            best = v
            if best == cap:
                break
    return best


def _witness(cls: ConceptClass, key: tuple[int, ...], h: int, node: int, internal: list, leaves: list) -> None:
    if h == 0:
        if key:
            # smallest class index among the surviving concepts
            leaves[node - len(internal)] = min(cls.index(c) for c in key)
        return
    target = _rho(key, h)
    for x in range(cls.domain_size):
        ins, outs = _split(key, x)
        if _rho(ins, h - 1) + _rho(outs, h - 1) == target:
            break
    internal[node] = x
    _witness(cls, ins, h - 1, 2 * node + 1, internal, leaves)
    _witness(cls, outs, h - 1, 2 * node + 2, internal, leaves)


def thicket_shatter(cls: ConceptClass, height: int, witness: bool = True) -> ShatterReport:
    """Maximum number of well-labeled leaves over all height-``height`` element trees.

    Left subtrees keep the concepts containing the node's example, right
    subtrees those omitting it, so the optimum decomposes node by node.
    Ties in the witness go to the smallest example, then the smallest concept
    index; leaves that cannot be well-labeled get concept 0.
    """
    if cls.is_empty:
        raise ThicketError("thicket_shatter of the empty class is undefined")
    if height < 0:
        raise ThicketError("height must be non-negative")
    limits = caps.get_caps()
    caps.check(height, limits.max_height, "height")
    caps.check(len(cls), limits.max_concepts, "concepts")
    key = _key(cls)
    value = _rho(key, height)
    tree = None
    if witness:
        internal = [0] * ((1 << height) - 1)
        leaves = [0] * (1 << height)
        _witness(cls, key, height, 0, internal, leaves)
        tree = BinaryElementTree(height, tuple(internal), tuple(leaves))
    return ShatterReport(height, value, tree)


def ldim_by_shatter(cls: ConceptClass) -> int:
    """Largest ``n`` with ``thicket_shatter(cls, n) == 2**n``, found by climbing ``n``."""
    n = 0
    while thicket_shatter(cls, n + 1, witness=False).max_well_labeled == 1 << (n + 1):
        n += 1
    return n


@dataclass(frozen=True)
class RankRegion:
    """A 0/1 relation between row objects and column parameters, and a region of rows."""

    relation: tuple[tuple[int, ...], ...]
    region: frozenset[int]

    def __post_init__(self):
        rel = tuple(tuple(int(v) for v in row) for row in self.relation)
        object.__setattr__(self, "relation", rel)
        object.__setattr__(self, "region", frozenset(self.region))
        if rel and len({len(r) for r in rel}) != 1:
            raise ThicketError("relation matrix must be rectangular")
        if any(v not in (0, 1) for r in rel for v in r):
            raise ThicketError("relation matrix entries must be 0 or 1")
        for i in self.region:
            if not 0 <= i < len(rel):
                raise ThicketError(f"region row {i} out of range")

    @classmethod
    def full(cls, relation: Sequence[Sequence[int]]) -> RankRegion:
        return cls(tuple(tuple(r) for r in relation), frozenset(range(len(relation))))

    @property
    def columns(self) -> int:
        return len(self.relation[0]) if self.relation else 0


def shelah_rank(rr: RankRegion) -> int:
    """2-rank of the region: rank >= d+1 iff some column splits it into two parts both of rank >= d."""
    if not rr.region:
        raise ThicketError("shelah_rank needs a non-empty region")
    columns = []
    for a in range(rr.columns):
        m = 0
        for i, row in enumerate(rr.relation):
            if row[a]:
                m |= 1 << i
        columns.append(m)
    memo: dict[int, int] = {}

    def rank(region: int) -> int:
        if region == 0:
            return -1
        size = popcount(region)
        if size == 1:
            return 0
        if region in memo:
            return memo[region]
        upper = size.bit_length() - 1
        best = 0
        for col in columns:
            inside, outside = region & col, region & ~col
            if not inside or not outside:
                continue
            v = min(rank(inside), rank(outside)) + 1
            if v > best:
                best = v
                if best == upper:
                    break
        memo[region] = best
        return best

    start = 0
    for i in rr.region:
        start |= 1 << i
    return rank(start)


def relation_class(relation: Sequence[Sequence[int]]) -> ConceptClass:
    """The class whose domain is the relation's columns and whose concepts are its (distinct) rows."""
    if not relation or not relation[0]:
        raise ThicketError("relation needs at least one row and one column")
    masks = dict.fromkeys(sum(1 << a for a, v in enumerate(row) if v) for row in relation)
    return ConceptClass(len(relation[0]), tuple(masks))
