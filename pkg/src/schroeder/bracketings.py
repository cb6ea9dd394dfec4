"""Word and set bracketings as text, and their tree correspondences.

Word bracketings use the letter ``x`` with no brackets around the whole word
or around single letters, e.g. ``x(x(xx))``. Set bracketings use a strict,
fully braced grammar::

    S := Label | '{' S (',' S)+ '}'

so ``{1,{2,3}}`` is the unordered leaf-labeled tree with a leaf and a cherry
under the root. Whitespace is never accepted.
"""

from __future__ import annotations

from enum import Enum

from .trees import LEAF, Tree, canonicalize, is_labeled, leaves, postorder, preorder, validate

DIGITS = frozenset("0123456789")


class BracketingKind(Enum):
    WORD_BINARY = "word-binary"
    WORD_GENERAL = "word-general"
    SET_BINARY = "set-binary"
    SET_GENERAL = "set-general"

    @property
    def binary(self) -> bool:
        return self in (BracketingKind.WORD_BINARY, BracketingKind.SET_BINARY)

    @property
    def is_word(self) -> bool:
        return self in (BracketingKind.WORD_BINARY, BracketingKind.WORD_GENERAL)


class BracketingError(ValueError):
    """Malformed bracketing text or a tree that has no bracketing of the requested kind."""

    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")
        self.pos = pos


def _check_degrees(t: Tree, kind: BracketingKind) -> None:
    for v in preorder(t):
        d = len(v.children)
        if d == 1:
            raise BracketingError("vertex of out-degree 1 has no bracketing")
        if kind.binary and d not in (0, 2):
            raise BracketingError(f"vertex of out-degree {d} in a binary bracketing")


def parse_word(s: str, kind: BracketingKind = BracketingKind.WORD_GENERAL) -> Tree:
    if not kind.is_word:
        raise ValueError(f"{kind.value} is not a word bracketing kind")
    if not s:
        raise BracketingError("empty word")
    stack: list[list[Tree]] = [[]]
    opened: list[int] = []
    for i, ch in enumerate(s):
        if ch == "x":
            stack[-1].append(LEAF)
        elif ch == "(":
            stack.append([])
            opened.append(i)
        elif ch == ")":
            if len(stack) == 1:
                raise BracketingError("unbalanced ')'", i)
            items = stack.pop()
            start = opened.pop()
            if not items:
                raise BracketingError("empty brackets", start)
            if len(items) == 1:
                raise BracketingError("brackets around a single item", start)
            stack[-1].append(Tree(tuple(items)))
        else:
            raise BracketingError(f"unexpected character {ch!r}", i)
    if len(stack) != 1:
        raise BracketingError("unbalanced '('", opened[-1])
    top = stack[0]
    if len(top) == 1:
        if not top[0].is_leaf:
            raise BracketingError("brackets around the whole word", 0)
        t = top[0]
    else:
        t = Tree(tuple(top))
    _check_degrees(t, kind)
    return t


def serialize_word(t: Tree, kind: BracketingKind = BracketingKind.WORD_GENERAL) -> str:
    if not kind.is_word:
        raise ValueError(f"{kind.value} is not a word bracketing kind")
    if is_labeled(t):
        raise BracketingError("word bracketings are unlabeled")
    _check_degrees(t, kind)
    out: list[str] = []
    stack: list = [(t, True)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        v, top = item
        if v.is_leaf:
            out.append("x")
            continue
        if not top:
            out.append("(")
            stack.append(")")
        stack.extend((c, False) for c in reversed(v.children))
    return "".join(out)


def parse_set(s: str, kind: BracketingKind = BracketingKind.SET_GENERAL) -> Tree:
    """Parse a fully braced set bracketing into its canonical labeled tree."""
    if kind.is_word:
        raise ValueError(f"{kind.value} is not a set bracketing kind")
    if not s:
        raise BracketingError("empty set bracketing")
    stack: list[list[Tree]] = []
    top: list[Tree] = []
    expect_item = True
    i = 0
    while i < len(s):
        ch = s[i]
        if ch in DIGITS:
            if not expect_item:
                raise BracketingError("missing ','", i)
            j = i
            while j < len(s) and s[j] in DIGITS:
                j += 1
            tok = s[i:j]
            if tok[0] == "0":
                raise BracketingError(f"label {tok!r} is not a positive integer without leading zeros", i)
            (stack[-1] if stack else top).append(Tree(label=int(tok)))
            expect_item = False
            i = j
            continue
        if ch == "{":
            if not expect_item:
                raise BracketingError("missing ','", i)
            stack.append([])
        elif ch == ",":
            if expect_item or not stack:
                raise BracketingError("unexpected ','", i)
            expect_item = True
        elif ch == "}":
            if not stack:
                raise BracketingError("unbalanced '}'", i)
            if expect_item:
                raise BracketingError("expected a label or '{'", i)
            items = stack.pop()
            if len(items) < 2:
                raise BracketingError("brace group with a single element", i)
            (stack[-1] if stack else top).append(Tree(tuple(items)))
            expect_item = False
        else:
            raise BracketingError(f"unexpected character {ch!r}", i)
        i += 1
    if stack:
        raise BracketingError("unbalanced '{'", len(s))
    if len(top) != 1:
        raise BracketingError("top level must be a single label or brace group")
    t = top[0]
    try:
        validate(t)
    except ValueError as e:
        raise BracketingError(str(e)) from None
    _check_degrees(t, kind)
    return canonicalize(t)


def serialize_set(t: Tree, kind: BracketingKind = BracketingKind.SET_GENERAL) -> str:
    if kind.is_word:
        raise ValueError(f"{kind.value} is not a set bracketing kind")
    if any(v.label is None for v in leaves(t)):
        raise BracketingError("set bracketings need a fully labeled tree")
    validate(t)
    _check_degrees(t, kind)
    t = canonicalize(t)
    text: dict[int, str] = {}
    for v in postorder(t):
        if v.is_leaf:
            text[id(v)] = str(v.label)
        else:
            text[id(v)] = "{" + ",".join(text[id(c)] for c in v.children) + "}"
    return text[id(t)]


def parse(s: str, kind: BracketingKind) -> Tree:
    return parse_word(s, kind) if kind.is_word else parse_set(s, kind)


def serialize(t: Tree, kind: BracketingKind) -> str:
    return serialize_word(t, kind) if kind.is_word else serialize_set(t, kind)
