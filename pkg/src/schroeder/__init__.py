"""Bracketings of words and sets as weighted random trees."""

from .trees import Tree, canonicalize, from_json, leaf, node, to_json, tree_statistics
from .weights import FAMILIES, P1, P2, P3, P4, Family, WeightSeq, family

__all__ = [
    "FAMILIES",
    "P1",
    "P2",
    "P3",
    "P4",
    "Family",
    "Tree",
    "WeightSeq",
    "canonicalize",
    "family",
    "from_json",
    "leaf",
    "node",
    "to_json",
    "tree_statistics",
]
