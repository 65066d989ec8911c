from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from condikit.formula import (
    BOT,
    TOP,
    And,
    Atom,
    CondBox,
    CondDiam,
    Imp,
    Or,
    ParseError,
    is_diamond_free,
    neg,
    parse,
    random_formula,
    to_text,
    weight,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_sugar_is_expanded():
    assert parse("p > true") == CondBox(p, Imp(BOT, BOT))
    assert parse("~(p ?> false)") == Imp(CondDiam(p, BOT), BOT)
    assert parse("p <-> q") == And(Imp(p, q), Imp(q, p))


def test_precedence():
    assert parse("p & q -> p") == Imp(And(p, q), p)
    assert parse("p | q & r") == Or(p, And(q, r))
    assert parse("~p & q") == And(neg(p), q)
    assert parse("p & q > r | p") == CondBox(And(p, q), Or(r, p))


def test_associativity():
    assert parse("p -> q -> r") == Imp(p, Imp(q, r))
    assert parse("p & q & r") == And(And(p, q), r)
    assert parse("p | q | r") == Or(Or(p, q), r)
    assert parse("p -> q > r") == Imp(p, CondBox(q, r))


@pytest.mark.parametrize("text", ["p > q > r", "p > q -> r", "p ?> q > r", "p <-> q <-> r"])
def test_conditionals_need_parentheses(text):
    with pytest.raises(ParseError):
        parse(text)


@pytest.mark.parametrize("text,pos", [("p & ", 4), ("p $ q", 2), ("(p", 2), ("p q", 2), ("P", 0)])
def test_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position == pos


def test_keywords_are_not_atoms():
    assert parse("true") == TOP
    assert parse("false") == BOT
    assert parse("trueish") == Atom("trueish")


def test_printer_minimal_parentheses():
    assert to_text(Imp(Imp(p, q), r)) == "(p -> q) -> r"
    assert to_text(Imp(p, CondBox(q, r))) == "p -> q > r"
    assert to_text(CondBox(p, Imp(q, r))) == "p > (q -> r)"
    assert to_text(Imp(CondBox(p, q), r)) == "(p > q) -> r"
    assert to_text(neg(CondDiam(p, BOT))) == "~(p ?> false)"
    assert to_text(And(p, And(q, r))) == "p & (q & r)"
    assert to_text(TOP) == "true"


def test_weight():
    assert weight(p) == 0
    assert weight(neg(p)) == 1
    assert weight(CondBox(And(p, q), r)) == 2
    assert weight(TOP) == 1


def test_is_diamond_free():
    assert is_diamond_free(CondBox(p, q))
    assert not is_diamond_free(CondDiam(p, q))
    assert not is_diamond_free(Imp(CondDiam(p, q), r))


def test_random_formula_contracts():
    for s in range(50):
        f = random_formula(0, 1, False, s)
        assert f in (p, BOT)
        assert is_diamond_free(random_formula(2, 1, False, s))
        assert weight(random_formula(3, 2, True, s)) <= 3
    assert random_formula(3, 2, True, 42) == random_formula(3, 2, True, 42)


def test_ordering_is_total_and_deterministic():
    fs = sorted({random_formula(4, 3, True, s) for s in range(200)})
    assert all(a < b for a, b in zip(fs, fs[1:]))


seeds = st.integers(min_value=0, max_value=2**32)


@settings(max_examples=300, deadline=None)
@given(seeds, st.integers(0, 8), st.booleans())
def test_round_trip(seed, w, dia):
    f = random_formula(w, 3, dia, seed)
    g = parse(to_text(f))
    assert g == f
    assert weight(g) == weight(f)


@settings(max_examples=200, deadline=None)
@given(seeds, st.integers(0, 8))
def test_diamond_free_matches_token_scan(seed, w):
    f = random_formula(w, 3, True, seed)
    assert is_diamond_free(f) == ("?>" not in to_text(f))
