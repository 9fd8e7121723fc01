"""Combinatorial models of Lefschetz fibrations with a 2-disk base.

A fibration is entered as a labeled line diagram or a labeled rectangular
diagram.  Its invariants come from a ribbon graph model of the regular fiber
carrying the signed vanishing cycles.
"""

from .braidcore import (
    BraidWord,
    HalfTwistSequence,
    MonotonicBand,
    Permutation,
    band_to_word,
    hurwitz_slide,
    is_monotonic,
    perm_of,
    total_braid,
    word_reduce,
)
from .linediagram import LineDiagram, parse_lfd, serialize_lfd
from .fiber import Cycle, FiberSurface, LFPresentation, build_fiber, lf_from_linediagram
from .rectdiagram import RectDiagram, parse_rect, serialize_rect, validate
from .braider import braid_up, flatten, monotonize
from .invariants import certify, report

__all__ = [
    "BraidWord",
    "Cycle",
    "FiberSurface",
    "HalfTwistSequence",
    "LFPresentation",
    "LineDiagram",
    "MonotonicBand",
    "Permutation",
    "RectDiagram",
    "band_to_word",
    "braid_up",
    "build_fiber",
    "certify",
    "flatten",
    "hurwitz_slide",
    "is_monotonic",
    "lf_from_linediagram",
    "monotonize",
    "parse_lfd",
    "parse_rect",
    "perm_of",
    "report",
    "serialize_lfd",
    "serialize_rect",
    "total_braid",
    "validate",
    "word_reduce",
]

__version__ = "0.1.0"
