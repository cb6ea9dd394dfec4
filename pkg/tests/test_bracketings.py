from __future__ import annotations

import pytest
from hypothesis import given

from schroeder.bracketings import (
    BracketingError,
    BracketingKind as K,
    parse,
    parse_set,
    parse_word,
    serialize,
    serialize_set,
    serialize_word,
)
from schroeder.counting import enumerate_trees
from schroeder.trees import LEAF, canonicalize, leaf, node

from test_trees import labeled_trees, plane_trees

FIGURE_ONE = ["x(x(xx))", "x((xx)x)", "(xx)(xx)", "(x(xx))x", "((xx)x)x"]


def test_two_cherries():
    assert parse_word("(xx)(xx)", K.WORD_BINARY) == node(node(LEAF, LEAF), node(LEAF, LEAF))


def test_single_letter():
    assert parse_word("x", K.WORD_BINARY) == LEAF
    assert serialize_word(LEAF, K.WORD_BINARY) == "x"


def test_right_caterpillar():
    assert parse_word("x(x(xx))", K.WORD_BINARY) == node(LEAF, node(LEAF, node(LEAF, LEAF)))


def test_figure_one_strings_are_distinct_binary_trees():
    trees = {parse_word(s, K.WORD_BINARY) for s in FIGURE_ONE}
    assert len(trees) == 5
    assert trees == set(enumerate_trees("P1", 4))
    for s in FIGURE_ONE:
        assert serialize_word(parse_word(s, K.WORD_BINARY), K.WORD_BINARY) == s


def test_star_serializes_flat():
    assert serialize_word(node(LEAF, LEAF, LEAF), K.WORD_GENERAL) == "xxx"
    assert serialize_word(node(node(LEAF, LEAF), LEAF), K.WORD_GENERAL) == "(xx)x"


@pytest.mark.parametrize(
    "s",
    ["", "()", "(x)", "(xx", "xx)", "(xx)", "((xx)x)", "xy", "x x", "x()x", "(x)(xx)", "X"],
)
def test_word_syntax_errors(s):
    with pytest.raises(BracketingError):
        parse_word(s, K.WORD_GENERAL)


def test_binary_kind_rejects_wide_nodes():
    with pytest.raises(BracketingError):
        parse_word("xxx", K.WORD_BINARY)
    with pytest.raises(BracketingError):
        serialize_word(node(LEAF, LEAF, LEAF), K.WORD_BINARY)


def test_word_serializer_rejects_unary_and_labels():
    with pytest.raises(BracketingError):
        serialize_word(node(LEAF, node(LEAF)), K.WORD_GENERAL)
    with pytest.raises(BracketingError):
        serialize_word(node(leaf(1), leaf(2)), K.WORD_GENERAL)


def test_error_position():
    with pytest.raises(BracketingError) as e:
        parse_word("x(x)", K.WORD_GENERAL)
    assert e.value.pos == 1


def test_set_examples():
    assert parse_set("{{1,2},{3,4}}", K.SET_BINARY) == node(node(leaf(1), leaf(2)), node(leaf(3), leaf(4)))
    assert parse_set("1") == leaf(1)
    assert parse_set("{1,2,3}") == node(leaf(1), leaf(2), leaf(3))


def test_set_parse_is_canonical():
    assert parse_set("{3,{2,1}}") == node(node(leaf(1), leaf(2)), leaf(3))
    assert serialize_set(node(leaf(3), node(leaf(2), leaf(1)))) == "{{1,2},3}"


@pytest.mark.parametrize(
    "s",
    [
        "",
        "{1}",
        "{1,2}{3,4}",
        "1,2,3",
        "1{2,3}",
        "{1,1}",
        "{1,3}",
        "{0,1}",
        "{01,2}",
        "{1, 2}",
        "{1,2",
        "1,2}",
        "{1,,2}",
        "{,1,2}",
        "{1,2,}",
        "{{1,2}}",
        "{1²,2}",
        "{-1,1}",
        "{}",
    ],
)
def test_set_syntax_errors(s):
    with pytest.raises(BracketingError):
        parse_set(s)


def test_set_binary_kind():
    with pytest.raises(BracketingError):
        parse_set("{1,2,3}", K.SET_BINARY)
    assert serialize_set(parse_set("{1,{2,3}}"), K.SET_BINARY) == "{1,{2,3}}"


def test_set_serializer_needs_labels():
    with pytest.raises(BracketingError):
        serialize_set(node(LEAF, LEAF))


def test_kind_mismatch():
    with pytest.raises(ValueError):
        parse_word("xx", K.SET_GENERAL)
    with pytest.raises(ValueError):
        parse_set("1", K.WORD_GENERAL)


@pytest.mark.parametrize("fam,kind", [("P1", K.WORD_BINARY), ("P2", K.WORD_GENERAL), ("P3", K.SET_BINARY), ("P4", K.SET_GENERAL)])
def test_round_trip_and_injective_on_enumerations(fam, kind):
    for n in range(1, 6):
        trees = enumerate_trees(fam, n)
        strings = [serialize(t, kind) for t in trees]
        assert len(set(strings)) == len(trees)
        for t, s in zip(trees, strings):
            assert parse(s, kind) == t


@given(plane_trees())
def test_word_round_trip_property(t):
    assert parse_word(serialize_word(t)) == t


@given(labeled_trees())
def test_set_round_trip_property(t):
    assert parse_set(serialize_set(t)) == canonicalize(t)
