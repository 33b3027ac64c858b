"""Exact minimum densities of periodic identifying and locating-dominating codes
on gridlike graphs, via a strip automaton and Karp's minimum mean cycle algorithm."""

from .constraints import ClauseFamily, ClauseSet, CodeKind, CodeSpec, generate_clauses, minimize
from .engine import SearchRequest, SearchResult, min_density, sweep
from .errors import (DegeneratePeriod, GridCodeError, IndexTooLarge, NoCycle, NotInLattice,
                     ResourceLimit, TwinVertices)
from .grid import GridModel, Lattice2, get_grid, normalize_period
from .mmc import MeanCycleResult, Variant, WeightedDigraph, karp, oracle_min_mean
from .periodic import PeriodicCode
from .verifier import torus_bruteforce, verify_code

__version__ = "0.1.0"

__all__ = [
    "ClauseFamily", "ClauseSet", "CodeKind", "CodeSpec", "generate_clauses", "minimize",
    "SearchRequest", "SearchResult", "min_density", "sweep",
    "DegeneratePeriod", "GridCodeError", "IndexTooLarge", "NoCycle", "NotInLattice", "ResourceLimit", "TwinVertices",
    "GridModel", "Lattice2", "get_grid", "normalize_period",
    "MeanCycleResult", "Variant", "WeightedDigraph", "karp", "oracle_min_mean",
    "PeriodicCode", "torus_bruteforce", "verify_code",
]
