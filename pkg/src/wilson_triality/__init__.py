"""Regular maps with trialities but no dualities on PSL(2, q^3).

Finite-field arithmetic, PSL(2, F) matrices and permutation actions, the
Wilson operators on map triples, an exhaustive search for Class III maps,
and the rank-four coset geometry built from such a map.
"""

__version__ = "0.1.0"

from .gf import FieldCtx, FieldElement, build_field
from .maps import (
    MapTriple,
    MapType,
    WilsonClass,
    WilsonOp,
    are_isomorphic,
    map_type,
    validate_triple,
    wilson_class,
    wilson_image,
)
from .psl2 import PSL2
from .search import TABLE1, SearchParams, run_search, verify_solution

__all__ = [
    "PSL2",
    "TABLE1",
    "FieldCtx",
    "FieldElement",
    "MapTriple",
    "MapType",
    "SearchParams",
    "WilsonClass",
    "WilsonOp",
    "are_isomorphic",
    "build_field",
    "map_type",
    "run_search",
    "validate_triple",
    "verify_solution",
    "wilson_class",
    "wilson_image",
]
