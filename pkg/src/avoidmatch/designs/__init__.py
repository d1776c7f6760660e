"""Concrete instances and auxiliary-hypergraph reductions."""

from .instance import DesignInstance, EdgeColoring, ListAssignment
from .reductions import (
    RegularizeGuardError,
    build_rainbow,
    decode_disjoint,
    decode_list,
    decode_rainbow,
    encode_disjoint,
    encode_list,
    lift_disjoint,
    lift_list,
    random_decrease,
    regularize,
)
from .steiner import (
    ConfigFreeIndex,
    ConfigGuardError,
    ExplicitOracle,
    PartiteHost,
    SteinerHost,
    SteinerOracle,
    build_partite_aux,
    build_steiner_aux,
    estimate_configurations,
    greedy_complete,
    minimal_configurations,
)

__all__ = [
    "DesignInstance", "EdgeColoring", "ListAssignment",
    "RegularizeGuardError", "build_rainbow", "decode_rainbow", "lift_disjoint", "encode_disjoint",
    "decode_disjoint", "lift_list", "encode_list", "decode_list", "regularize", "random_decrease",
    "ConfigGuardError", "ExplicitOracle", "PartiteHost", "SteinerHost", "SteinerOracle",
    "build_partite_aux", "build_steiner_aux", "estimate_configurations", "minimal_configurations",
    "ConfigFreeIndex", "greedy_complete",
]
