"""Concept-class generators and half-graph (order property) search.

Finite stand-ins: ``thresholds`` has the order property in its purest form;
``cosets`` (all cosets of all subgroups of Z_m) and ``variety_fibers``
(zero sets of f(x, a) over F_p) come from stable structures and keep a small
Littlestone dimension as the domain grows.
"""
from __future__ import annotations

import ast
import math
import operator
import random as _random
from dataclasses import dataclass
from typing import Callable, Union

from . import caps
from .core import ConceptClass, bits, popcount
from .dimensions import littlestone_dim, vc_dim
from .errors import CapExceeded, ThicketError

FAMILIES = ("powerset", "singletons", "thresholds", "cosets", "variety_fibers", "random")


def _dedup(n: int, masks) -> ConceptClass:
    return ConceptClass(n, tuple(dict.fromkeys(masks)))


def powerset(n: int) -> ConceptClass:
    caps.check(1 << n, caps.get_caps().max_concepts, "concepts")
    return ConceptClass(n, tuple(range(1 << n)))


def singletons(n: int) -> ConceptClass:
    return ConceptClass(n, tuple(1 << x for x in range(n)))


def thresholds(n: int) -> ConceptClass:
    """Initial segments {x < k} for k = 0..n."""
    return ConceptClass(n, tuple((1 << k) - 1 for k in range(n + 1)))


def cosets(m: int) -> ConceptClass:
    """Every coset of every subgroup of Z_m, grouped by subgroup order."""
    if m < 1:
        raise ThicketError("m must be positive")
    masks = []
    for d in range(1, m + 1):
        if m % d:
            continue
        # subgroup of order d is generated by m // d
        step = m // d
        for r in range(step):
            masks.append(sum(1 << ((r + k * step) % m) for k in range(d)))
    return _dedup(m, masks)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Pow: pow}


def parse_polynomial(text: str) -> Callable[[int, int], int]:
    """Compile an integer polynomial in ``x`` and ``a`` (``+ - * **`` and integer constants)."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ThicketError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
            if isinstance(node.op, ast.Pow) and not (
                isinstance(node.right, ast.Constant) and isinstance(node.right.value, int) and node.right.value >= 0
            ):
                raise ThicketError("exponents must be non-negative integer constants")
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            check(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            pass
        elif isinstance(node, ast.Name) and node.id in ("x", "a"):
            pass
        else:
            raise ThicketError(f"unsupported term in polynomial {text!r}: {ast.dump(node)}")

    check(tree)

    def evaluate(node, x, a):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, x, a)
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](evaluate(node.left, x, a), evaluate(node.right, x, a))
        if isinstance(node, ast.UnaryOp):
            v = evaluate(node.operand, x, a)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Constant):
            return node.value
        return x if node.id == "x" else a

    return lambda x, a: evaluate(tree, x, a)


def variety_fibers(p: int, f: Union[str, Callable[[int, int], int]]) -> ConceptClass:
    """Zero sets {x in F_p : f(x, a) = 0} for a in F_p; repeated fibers are merged."""
    if not is_prime(p):
        raise ThicketError(f"p = {p} is not prime")
    fn = parse_polynomial(f) if isinstance(f, str) else f
    masks = []
    for a in range(p):
        masks.append(sum(1 << x for x in range(p) if fn(x, a) % p == 0))
    return _dedup(p, masks)


def random_class(n: int, m: int, seed: int) -> ConceptClass:
    """``m`` distinct concepts drawn uniformly from the subsets of an ``n``-point domain."""
    if m < 1 or m > 1 << n:
        raise ThicketError(f"need 1 <= m <= 2**n distinct concepts, got m = {m}")
    rng = _random.Random(seed)
    return ConceptClass(n, tuple(rng.sample(range(1 << n), m)))


def generate(family: str, **params) -> ConceptClass:
    try:
        if family == "powerset":
            return powerset(int(params["n"]))
        if family == "singletons":
            return singletons(int(params["n"]))
        if family == "thresholds":
            return thresholds(int(params["n"]))
        if family == "cosets":
            return cosets(int(params["m"]))
        if family == "variety_fibers":
            return variety_fibers(int(params["p"]), params["f"])
        if family == "random":
            return random_class(int(params["n"]), int(params["m"]), int(params["seed"]))
    except KeyError as exc:
        raise ThicketError(f"family {family!r} needs parameter {exc.args[0]!r}") from None
    raise ThicketError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def size_params(family: str, size: int, **extra) -> dict:
    """The parameters that make ``size`` the domain size of ``family``."""
    if family in ("powerset", "singletons", "thresholds"):
        return {"n": size}
    if family == "cosets":
        return {"m": size}
    if family == "variety_fibers":
        return {"p": size, "f": extra.get("f", "x - a")}
    if family == "random":
        return {"n": size, "m": extra.get("m", size), "seed": extra.get("seed", 0)}
    raise ThicketError(f"unknown family {family!r}")


@dataclass(frozen=True)
class HalfGraphWitness:
    """Examples ``rows`` and concept indices ``columns`` with rows[i] in columns[j] iff i <= j."""

    rows: tuple[int, ...]
    columns: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def check(self, cls: ConceptClass) -> bool:
        k = self.size
        return all(
            bool((cls.concepts[self.columns[j]] >> self.rows[i]) & 1) == (i <= j) for i in range(k) for j in range(k)
        )

    def to_json(self) -> dict:
        return {"size": self.size, "rows": list(self.rows), "columns": list(self.columns)}


def max_half_graph(cls: ConceptClass, greedy: bool = False) -> HalfGraphWitness:
    """Largest induced half-graph between examples and concepts.

    Pairs are added in order. A new row must avoid every chosen column and
    the new column must contain every chosen row, so the search state is just
    (chosen rows, union of chosen columns). Exact search is capped; with
    ``greedy`` an over-cap class falls back to the first chain found.
    """
    n = cls.domain_size
    full = (1 << n) - 1
    work = len(cls) * n
    exact = work <= caps.get_caps().max_half_graph_work
    if not exact and not greedy:
        raise CapExceeded(
            f"search bound exceeded: half-graph work {work} > cap {caps.get_caps().max_half_graph_work}; pass greedy"
        )
    concepts = cls.concepts
    memo: dict[tuple[int, int], tuple] = {}

    def extend(rows: int, union: int) -> tuple:
        key = (rows, union)
        if key in memo:
            return memo[key]
        best: tuple = ()
        candidates = [(j, c) for j, c in enumerate(concepts) if c & rows == rows]
        reach = 0
        for _, c in candidates:
            reach |= c
        # every later row lies outside the union and inside some candidate column
        reach &= full & ~union
        bound = popcount(reach)
        for a in bits(reach):
            if len(best) >= bound:
                break
            need = rows | (1 << a)
            for j, c in candidates:
                if c & need != need:
                    continue
                tail = extend(need, union | c)
                if 1 + len(tail) > len(best):
                    best = ((a, j),) + tail
                    if len(best) >= bound:
                        break
                if not exact:
                    break
            if not exact and best:
                break
        memo[key] = best
        return best

    chain = extend(0, 0)
    return HalfGraphWitness(tuple(a for a, _ in chain), tuple(j for _, j in chain))


def dual_class(cls: ConceptClass) -> ConceptClass:
    """Domain = concept indices; one concept per example: the concepts containing it."""
    masks = []
    for x in range(cls.domain_size):
        masks.append(sum(1 << i for i, c in enumerate(cls.concepts) if (c >> x) & 1))
    return _dedup(len(cls), masks)


def growth(family: str, sizes, **extra) -> list[dict]:
    rows = []
    for size in sizes:
        c = generate(family, **size_params(family, size, **extra))
        rows.append(
            {
                "size": size,
                "num_concepts": len(c),
                "vc": vc_dim(c),
                "ldim": littlestone_dim(c),
                "half_graph": max_half_graph(c, greedy=True).size,
            }
        )
    return rows
