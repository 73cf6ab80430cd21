"""Segment-based hybrid local search for HP protein folding on the FCC lattice."""

from .heuristics import HeuristicKind, HeuristicState, Move, execute, recompute, simulate, value
from .lattice import basis_vectors, common_neighbors, is_neighbor, squared_distance
from .model import Conformation, HPSequence, convert_aa_to_hp, energy, parse_sequence, validate
from .search import SearchParams, lws_run

__all__ = [
    "Conformation",
    "HPSequence",
    "HeuristicKind",
    "HeuristicState",
    "Move",
    "SearchParams",
    "basis_vectors",
    "common_neighbors",
    "convert_aa_to_hp",
    "energy",
    "execute",
    "is_neighbor",
    "lws_run",
    "parse_sequence",
    "recompute",
    "simulate",
    "squared_distance",
    "validate",
    "value",
]

__version__ = "0.1.0"
