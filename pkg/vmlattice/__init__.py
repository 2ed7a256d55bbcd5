"""Vertex modified rank-1 lattice rules and their worst-case errors."""

import logging

from .errors import InputError, NumericalConsistencyError, VmLatticeError
from .kernels import Kernel, ProductWeights
from .rules import LatticeRule, WeightedRule, build_rule, optimal_vertex_weights, trapezoidal_weights
from .search import SearchResult, best_generator, fibonacci_rule, reproduce_table
from .wce import WceBreakdown, mixture_term_s2, wce_decomposition, wce_generic, wce_korobov_lattice

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "InputError",
    "Kernel",
    "LatticeRule",
    "NumericalConsistencyError",
    "ProductWeights",
    "SearchResult",
    "VmLatticeError",
    "WceBreakdown",
    "WeightedRule",
    "best_generator",
    "build_rule",
    "fibonacci_rule",
    "mixture_term_s2",
    "optimal_vertex_weights",
    "reproduce_table",
    "trapezoidal_weights",
    "wce_decomposition",
    "wce_generic",
    "wce_korobov_lattice",
]
