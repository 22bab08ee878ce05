"""Fat-object intersection graphs, alpha-modulators, and the problems solved over them."""

from .errors import (
    CapExceeded,
    FatgraphError,
    Infeasible,
    ParseError,
    ShapeMismatch,
    SlackViolation,
)
from .graphcore import Graph
from .geometry import GeomObject, ObjectSet, build_intersection_graph, slab_separator
from .modulator import ModulatorDecomposition, amod_exact, decomposition_from_geometry
from .subcoloring import brute_subcoloring, solve_subcoloring
from .cutuncut import CutUncutInstance, brute_cutuncut, solve_cutuncut
from .reduction import NAEFormula, build_abstract_graph, parse_nae3sat, solve_nae_brute

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CutUncutInstance",
    "FatgraphError",
    "GeomObject",
    "Graph",
    "Infeasible",
    "ModulatorDecomposition",
    "NAEFormula",
    "ObjectSet",
    "ParseError",
    "ShapeMismatch",
    "SlackViolation",
    "amod_exact",
    "brute_cutuncut",
    "brute_subcoloring",
    "build_abstract_graph",
    "build_intersection_graph",
    "decomposition_from_geometry",
    "parse_nae3sat",
    "slab_separator",
    "solve_cutuncut",
    "solve_nae_brute",
    "solve_subcoloring",
]
