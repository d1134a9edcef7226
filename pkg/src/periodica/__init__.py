"""Torus diagrams of 3-periodic nets: rewriting, bounds, untangling search."""

from .diagram import (
    CrossingTriplet,
    Node,
    SquareDiagram,
    Strand,
    Tridiagram,
    ValidationReport,
    canonical_code,
    check_tridiagram,
    crossing,
    marker,
    permute_axes,
    strand_census,
    strands,
    triplet_of_crossings,
    validate_diagram,
    vertex,
)
from .pdgio import PdgSyntaxError, parse, parse_diagram, serialize

__all__ = [
    "CrossingTriplet",
    "Node",
    "PdgSyntaxError",
    "SquareDiagram",
    "Strand",
    "Tridiagram",
    "ValidationReport",
    "canonical_code",
    "check_tridiagram",
    "crossing",
    "marker",
    "parse",
    "parse_diagram",
    "permute_axes",
    "serialize",
    "strand_census",
    "strands",
    "triplet_of_crossings",
    "validate_diagram",
    "vertex",
]

__version__ = "0.1.0"
