"""Surface bonded link diagrams.

A library for diagrams of surfaces in 4-space presented as bonded link
diagrams: a planar-map data model with a text format, resolutions and
surface invariants, a data-driven local-move rewrite engine, the
semi-invariant counters used to separate the moves, budget-bounded
triviality and admissibility checks, and bidirectional move search.
"""

from .diagram import (BB, BL, BOND, BONDED, CLASSICAL, E, LINK, M, MARKED, X,
                      Bond, Dart, Diagram, DiagramError, FreeLoop, ModeError,
                      ValidationReport, Vertex, Violation)
from .textio import ParseError, parse_corpus, parse_diagram, serialize_diagram
from .build import DiagramBuilder
from .canonical import canonical_code

__all__ = [
    "BB", "BL", "BOND", "BONDED", "CLASSICAL", "E", "LINK", "M", "MARKED", "X",
    "Bond", "Dart", "Diagram", "DiagramError", "FreeLoop", "ModeError",
    "ValidationReport", "Vertex", "Violation",
    "ParseError", "parse_corpus", "parse_diagram", "serialize_diagram",
    "DiagramBuilder", "canonical_code",
]
