"""Rooted trees with optional leaf labels, canonical forms and per-tree statistics.

A single carrier type serves all four bracketing families. Ordered unlabeled
trees are used as-is; unordered leaf-labeled trees are stored in canonical
form (children sorted by their smallest leaf label), so equality of canonical
forms is equality of the underlying unordered trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence


@dataclass(frozen=True, slots=True, eq=False)
class Tree:
    """Immutable rooted ordered tree. A vertex is a leaf iff it has no children.

    Equality, hashing and repr walk the tree iteratively, so arbitrarily deep
    trees are fine.
    """

    children: tuple[Tree, ...] = ()
    label: int | None = None

    def __post_init__(self) -> None:
        if self.label is not None and self.children:
            raise ValueError("labels are only allowed on leaves")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def degree(self) -> int:
        return len(self.children)

    def _code(self) -> list:
        return [(len(v.children), v.label) for v in preorder(self)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return self is other or self._code() == other._code()

    def __hash__(self) -> int:
        return hash(tuple(self._code()))

    def __repr__(self) -> str:
        text: dict[int, str] = {}
        for v in postorder(self):
            if v.is_leaf:
                text[id(v)] = "Leaf()" if v.label is None else f"Leaf({v.label})"
            else:
                text[id(v)] = "Node(" + ", ".join(text[id(c)] for c in v.children) + ")"
        return text[id(self)]


LEAF = Tree()


def leaf(label: int | None = None) -> Tree:
    return LEAF if label is None else Tree(label=label)


def node(*children: Tree) -> Tree:
    if not children:
        raise ValueError("an internal node needs at least one child")
    return Tree(tuple(children))


def preorder(t: Tree) -> Iterator[Tree]:
    stack = [t]
    while stack:
        v = stack.pop()
        yield v
        stack.extend(reversed(v.children))


def postorder(t: Tree) -> list[Tree]:
    """Vertices with every child before its parent (iterative, no recursion limit)."""
    out: list[Tree] = []
    stack = [t]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(v.children)
    out.reverse()
    return out


def leaves(t: Tree) -> list[Tree]:
    """Leaves in left-to-right order."""
    return [v for v in preorder(t) if v.is_leaf]


def leaf_count(t: Tree) -> int:
    return sum(1 for v in preorder(t) if v.is_leaf)


def degrees(t: Tree) -> list[int]:
    """Out-degrees in preorder; determines an ordered unlabeled tree completely."""
    return [len(v.children) for v in preorder(t)]


def from_preorder_degrees(degs: Sequence[int]) -> Tree:
    built: list[Tree] = []
    for d in reversed(degs):
        if d == 0:
            built.append(LEAF)
        else:
            if d > len(built) or d < 0:
                raise ValueError("degree sequence does not describe a single tree")
            kids = tuple(built.pop() for _ in range(d))
            built.append(Tree(kids))
    if len(built) != 1:
        raise ValueError("degree sequence does not describe a single tree")
    return built[0]


def is_labeled(t: Tree) -> bool:
    return any(v.label is not None for v in leaves(t))


def validate(t: Tree) -> None:
    """Raise ValueError unless labels are absent everywhere or form exactly {1..n}."""
    labels = [v.label for v in leaves(t)]
    present = [x for x in labels if x is not None]
    if not present:
        return
    if len(present) != len(labels):
        raise ValueError("either all leaves or no leaves carry labels")
    if sorted(present) != list(range(1, len(labels) + 1)):
        raise ValueError(f"leaf labels must be exactly 1..{len(labels)}")


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class TreeStats:
    leaves: int
    vertices: int
    height: int
    sum_leaf_heights: int
    leaves_at_height: dict[int, int] = field(default_factory=dict)
    nodes_at_height: dict[int, int] = field(default_factory=dict)


def tree_statistics(t: Tree) -> TreeStats:
    """Leaf/vertex counts and height profiles with the root at depth 0."""
    leaf_prof: dict[int, int] = {}
    node_prof: dict[int, int] = {}
    stack = [(t, 0)]
    while stack:
        v, d = stack.pop()
        node_prof[d] = node_prof.get(d, 0) + 1
        if v.children:
            stack.extend((c, d + 1) for c in v.children)
        else:
            leaf_prof[d] = leaf_prof.get(d, 0) + 1
    return TreeStats(
        leaves=sum(leaf_prof.values()),
        vertices=sum(node_prof.values()),
        height=max(node_prof),
        sum_leaf_heights=sum(k * c for k, c in leaf_prof.items()),
        leaves_at_height=dict(sorted(leaf_prof.items())),
        nodes_at_height=dict(sorted(node_prof.items())),
    )


# -- canonical forms and labels ----------------------------------------------


def _shape_key(t: Tree) -> tuple:
    keys: dict[int, tuple] = {}
    for v in postorder(t):
        keys[id(v)] = tuple(sorted(keys[id(c)] for c in v.children))
    return keys[id(t)]


def canonicalize(t: Tree) -> Tree:
    """Canonical representative of the unordered tree underlying ``t``.

    Labeled children are sorted by their minimum leaf label; unlabeled children
    by their canonical shape key (nested sorted tuples).
    """
    labeled = is_labeled(t)
    done: dict[int, tuple[Tree, Any]] = {}
    for v in postorder(t):
        if v.is_leaf:
            done[id(v)] = (v, v.label if labeled else ())
            continue
        kids = sorted((done[id(c)] for c in v.children), key=lambda p: p[1])
        key = kids[0][1] if labeled else tuple(k for _, k in kids)
        done[id(v)] = (Tree(tuple(c for c, _ in kids)), key)
    return done[id(t)][0]


def shape(t: Tree) -> Tree:
    """Canonical unlabeled unordered shape."""
    return canonicalize(forget_labels(t))


def forget_labels(t: Tree) -> Tree:
    if not is_labeled(t):
        return t
    built: dict[int, Tree] = {}
    for v in postorder(t):
        built[id(v)] = LEAF if v.is_leaf else Tree(tuple(built[id(c)] for c in v.children))
    return built[id(t)]


def relabel(t: Tree, labels: Sequence[int]) -> Tree:
    """Assign ``labels`` to the leaves in left-to-right order (existing labels are replaced)."""
    # subtrees may be shared objects, so work positionally on the preorder list
    labels = list(labels)
    built: list[Tree] = []
    for v in reversed(list(preorder(t))):
        if v.is_leaf:
            built.append(Tree(label=labels.pop()))
        else:
            built.append(Tree(tuple(built.pop() for _ in v.children)))
    if labels:
        raise ValueError("more labels than leaves")
    return built[0]


def label_uniformly(t: Tree, rng) -> Tree:
    """Label the leaves by a uniform random permutation of 1..n, left to right.

    ``rng`` needs a ``shuffle`` method (e.g. ``RngStream`` or ``random.Random``).
    The result keeps the order of ``t``; canonicalize it for the unordered tree.
    """
    if is_labeled(t):
        raise ValueError("tree is already labeled")
    perm = list(range(1, leaf_count(t) + 1))
    rng.shuffle(perm)
    return relabel(t, perm)


def min_label(t: Tree) -> int:
    return min(v.label for v in leaves(t))


# -- JSON ---------------------------------------------------------------------


def to_obj(t: Tree) -> dict:
    built: dict[int, dict] = {}
    for v in postorder(t):
        if v.is_leaf:
            built[id(v)] = {} if v.label is None else {"label": v.label}
        else:
            built[id(v)] = {"children": [built[id(c)] for c in v.children]}
    return built[id(t)]


def _leaf_from_obj(o: dict) -> Tree:
    if "label" not in o:
        return LEAF
    lab = o["label"]
    if not isinstance(lab, int) or isinstance(lab, bool) or lab < 1:
        raise ValueError(f"label must be a positive integer, got {lab!r}")
    return Tree(label=lab)


def from_obj(obj: Any) -> Tree:
    """Inverse of ``to_obj``; rejects any key other than ``label``/``children``."""
    out: list[Tree] = []
    stack: list[tuple[Any, bool]] = [(obj, False)]
    while stack:
        o, expanded = stack.pop()
        if expanded:
            k = len(o["children"])
            kids = tuple(out[len(out) - k :])
            del out[len(out) - k :]
            out.append(Tree(kids))
            continue
        if not isinstance(o, dict):
            raise ValueError(f"tree node must be an object, got {type(o).__name__}")
        extra = set(o) - {"label", "children"}
        if extra or ("label" in o and "children" in o):
            raise ValueError(f"invalid tree node keys: {sorted(o)}")
        if "children" in o:
            kids = o["children"]
            if not isinstance(kids, list) or not kids:
                raise ValueError("'children' must be a non-empty list")
            stack.append((o, True))
            stack.extend((c, False) for c in reversed(kids))
        else:
            out.append(_leaf_from_obj(o))
    t = out[0]
    validate(t)
    return t


def to_json(t: Tree) -> str:
    """Compact JSON text (same bytes as ``json.dumps(to_obj(t), separators=(",", ":"))``)."""
    text: dict[int, str] = {}
    for v in postorder(t):
        if v.is_leaf:
            text[id(v)] = "{}" if v.label is None else '{"label":%d}' % v.label
        else:
            text[id(v)] = '{"children":[' + ",".join(text[id(c)] for c in v.children) + "]}"
    return text[id(t)]


def from_json(text: str) -> Tree:
    return from_obj(json.loads(text))
