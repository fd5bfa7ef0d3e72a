"""Exact combinatorics and online-learning games on finite concept classes."""

__version__ = "0.1.0"

from .errors import CapExceeded, ThicketError
from .core import (
    BinaryElementTree,
    ConceptClass,
    LabeledExample,
    class_from_sets,
    is_well_labeled,
    restrict,
)
from .dimensions import (
    RankRegion,
    ShatterReport,
    littlestone_dim,
    shelah_rank,
    thicket_shatter,
    vc_dim,
)

__all__ = [
    "__version__",
    "BinaryElementTree",
    "CapExceeded",
    "ConceptClass",
    "LabeledExample",
    "RankRegion",
    "ShatterReport",
    "ThicketError",
    "class_from_sets",
    "is_well_labeled",
    "littlestone_dim",
    "restrict",
    "shelah_rank",
    "thicket_shatter",
    "vc_dim",
]
