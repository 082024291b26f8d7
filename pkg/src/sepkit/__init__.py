"""Nested separation systems that distinguish robust profiles, with torsos,
lifts, tree-decompositions and end-hosting decompositions of truncated
infinite graph families."""

from .errors import CapacityError, ConsistencyError, InputError, NotInducibleError, SepkitError
from .graph import SCHEMA, Graph
from .profiles import Haven, Profile, enumerate_profile_levels, enumerate_profiles
from .distinguisher import build_nested_distinguishing_set
from .decomposition import (
    TreeDecomposition,
    end_faithful_spanning_tree,
    nested_to_tree_decomposition,
    recursive_end_tree_decomposition,
    star_decomposition,
    validate_td,
)
from .families import FAMILIES, generate

__version__ = "0.1.0"

__all__ = [
    "SCHEMA", "Graph", "Haven", "Profile", "TreeDecomposition", "FAMILIES",
    "SepkitError", "InputError", "CapacityError", "ConsistencyError", "NotInducibleError",
    "enumerate_profiles", "enumerate_profile_levels", "build_nested_distinguishing_set",
    "nested_to_tree_decomposition", "validate_td", "star_decomposition",
    "recursive_end_tree_decomposition", "end_faithful_spanning_tree", "generate",
]
