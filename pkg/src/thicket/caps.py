"""Search caps for the exponential computations.

Every cap can be overridden through an environment variable named
``THICKET_<NAME>`` (for example ``THICKET_MAX_HEIGHT=14``). Raising them is
at your own risk: here be exponential dragons.
"""
import os
from dataclasses import dataclass, fields

from .errors import CapExceeded


@dataclass(frozen=True)
class Caps:
    max_height: int = 12
    max_concepts: int = 1 << 16
    max_game_domain: int = 16
    max_game_concepts: int = 4096
    max_experts: int = 200_000
    max_half_graph_work: int = 4096


def get_caps() -> Caps:
    values = {}
    for f in fields(Caps):
        raw = os.environ.get("THICKET_" + f.name.upper())
        if raw is not None:
            values[f.name] = int(raw)
    return Caps(**values)


def check(value: int, limit: int, what: str) -> None:
    if value > limit:
        raise CapExceeded(f"search bound exceeded: {what} = {value} > cap {limit}")
