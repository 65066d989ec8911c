from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from condikit.formula import Atom, parse, random_formula, weight
from condikit.hilbert.schemas import CHARACTERISTIC
from condikit.nested import (
    Bracket,
    CutError,
    MalformedNested,
    NestedSequent,
    StructuralError,
    apply_structural,
    check_nested,
    contract,
    cut_on,
    eliminate_cut,
    eliminate_rep,
    find_nested_error,
    generalized_init,
    interpret,
    invert,
    map_path,
    medial,
    necessitate,
    nested_from_json,
    nested_rule_instances,
    nested_to_json,
    nested_to_latex,
    node,
    normalize,
    parse_context,
    parse_nested,
    premises_for,
    prove_nested,
    prove_nested_formula,
    reduce_cut,
    render_nested,
    weaken,
)
from condikit.results import SearchBudget, Status
from condikit.semantics import ModelClass, find_countermodel, random_model, valid_in
from condikit.sequent import LogicId, prove_formula
from nested_corpus import box_example, cut_corpus, intck_theorems, proof

N = parse_nested
OLK = ModelClass.OLKHOVIKOV


# ---------------------------------------------------------------- sequents


def test_printing_round_trip():
    for text in ["p*, q^, [r: s*]", "p -> q*, [p & q: t^, [r: ]]", "", "[p: ]"]:
        ns = N(text)
        assert str(ns) == text
        assert N(str(ns)) == ns


def test_equality_ignores_order_of_items():
    assert N("p*, q*, [r: s*], [t: ]") == N("[t: ], q*, [r: s*], p*")
    assert hash(N("p*, q*")) == hash(N("q*, p*"))
    assert N("p*, p*") != N("p*")


def test_bullet_and_circle_are_accepted():
    assert N("p•, q∘") == N("p*, q^")


@pytest.mark.parametrize("text", ["p^, q^", "p^, [r: q^]", "p", "p*, {}"])
def test_malformed_nested_sequents(text):
    with pytest.raises(ValueError):
        N(text)


def test_input_and_nested_classification():
    assert N("p*, [q: r*]").is_input
    assert N("p*, [q: r^]").is_nested
    assert N("p*, [q: r^]").output_path() == (0,)


def test_contexts():
    c = parse_context("p*, [q: r*, [s: {}]]")
    assert c.depth == 2 and c.kind == "•"
    assert c.fill(N("t^")) == N("p*, [q: r*, [s: t^]]")
    o = parse_context("p^, [q: {}]")
    assert o.kind == "∘"
    with pytest.raises(MalformedNested):
        o.fill(N("t^"))
    assert o.fill(N("t*")) == N("p^, [q: t*]")
    assert str(parse_context("p*, {}")) == "p*, {}"
    with pytest.raises(ValueError):
        parse_context("p*")


def test_context_enter_and_strip():
    c = parse_context("p^, {}").enter(parse("q"))
    assert c.fill(N("r*")) == N("p^, [q: r*]")
    assert c.stripped().kind == "•"


def test_map_path_follows_equal_brackets():
    a = N("[p: q*], [r: ], [p: q*]")
    b = N("[p: q*], [p: q*], [r: ]")
    assert map_path(a, b, (2,)) == (1,)
    assert map_path(a, b, (1,)) == (2,)


# ---------------------------------------------------------------- interpretation


@pytest.mark.parametrize(
    "text,expected",
    [
        ("", "true"),
        ("p*, q^", "p -> q"),
        ("p*, [r: q*]", "p & (r ?> q)"),
        ("q^", "q"),
        ("p*, [r: s*, q^]", "p -> r > (s -> q)"),
        ("[r: ]", "r ?> true"),
    ],
)
def test_interpret(text, expected):
    assert interpret(N(text)) == parse(expected)


def test_interpret_is_independent_of_item_order():
    assert interpret(N("q*, p*, r^")) == interpret(N("p*, q*, r^"))


# ---------------------------------------------------------------- rules


def test_init_instance():
    rules = [i.rule for i in nested_rule_instances(N("p*, p^"))]
    assert "init" in rules


def test_dia_input_instance_opens_bracket():
    goal = N("p ?> q*, (p ?> (q | r))^")
    inst = [i for i in nested_rule_instances(goal) if i.rule == "dia*"]
    assert inst and inst[0].premises == (N("[p: q*], (p ?> (q | r))^"),)


def test_box_input_instance_has_three_premises():
    goal = N("(a > b)*, [c: d*], e^")
    (inst,) = [i for i in nested_rule_instances(goal) if i.rule == "box*"]
    assert inst.premises == (N("a*, c^"), N("c*, a^"), N("(a > b)*, [c: b*, d*], e^"))


def test_rules_apply_deep():
    goal = N("[p: [q: (r & s)*, r^]]")
    inst = [i for i in nested_rule_instances(goal) if i.rule == "and*"]
    assert inst[0].path == (0, 0)
    assert inst[0].premises == (N("[p: [q: r*, s*, r^]]"),)


def test_imp_input_left_premise_drops_output():
    goal = N("(a -> b)*, [c: e^]")
    (inst,) = [i for i in nested_rule_instances(goal) if i.rule == "imp*"]
    assert inst.premises == (N("(a -> b)*, a^, [c: ]"), N("b*, [c: e^]"))


def test_instances_need_a_nested_sequent():
    with pytest.raises(MalformedNested):
        nested_rule_instances(N("p*, [q: r*]"))


def test_every_instance_keeps_one_output():
    for f in intck_theorems(20, 7):
        d = prove_nested_formula(f).derivation
        for n in d.nodes():
            for inst in nested_rule_instances(n.conclusion):
                assert all(p.count_outputs() == 1 for p in inst.premises)


def test_checker_rejects_wrong_premise():
    d = node(N("(p & q)*, p^"), "and*", [node(N("q*, p^"), "init", (), (), Atom("p"))], (), parse("p & q"))
    where, msg = find_nested_error(d)
    assert where == () and "premise 0" in msg


def test_checker_rejects_structural_rules_unless_allowed():
    leaf = node(N("p*, p^"), "init", (), (), Atom("p"))
    d = node(N("p*, q*, p^"), "w", [leaf], (), extra=N("q*"))
    assert not check_nested(d)
    assert check_nested(d, allow=["w"])


def test_checker_rejects_two_outputs():
    d = node(NestedSequent((Atom("p"),), Atom("p"), (Bracket(Atom("q"), N("r^")),)), "init", (), (), Atom("p"))
    assert "nested sequent" in find_nested_error(d)[1]


def test_rule_data_must_match():
    from condikit.nested import RuleError

    with pytest.raises(RuleError):
        premises_for(N("p*, q^"), "and*", (), parse("p & q"))
    with pytest.raises(RuleError):
        premises_for(N("(p > q)*, r^"), "box*", (), parse("p > q"), 0)


# ---------------------------------------------------------------- search


@pytest.mark.parametrize(
    "text",
    [
        "(p ?> q) | (p ?> r) -> p ?> (q | r)",
        "((p ?> q) -> (p > r)) -> p > (q -> r)",
        "~~(true > false) -> (true > false)",
        "((p & q) > r) -> ((q & p) > r)",
        "~(p ?> false)",
    ],
)
def test_prove_nested_examples(text):
    r = prove_nested_formula(parse(text))
    assert r.status is Status.PROVED
    assert check_nested(r.derivation) and r.derivation.pure


@pytest.mark.parametrize("ax", CHARACTERISTIC[LogicId.INTCK], ids=lambda a: a.value)
def test_every_intck_axiom_is_proved(ax):
    r = prove_nested_formula(ax.schema)
    assert r.proved and check_nested(r.derivation)


def test_excluded_middle_is_not_proved():
    f = parse("p | ~p")
    r = prove_nested_formula(f)
    assert r.status in (Status.REFUTED, Status.BUDGET_EXHAUSTED)
    m, w = find_countermodel(f, OLK, max_worlds=2)
    assert not valid_in(m, f, OLK.profile)


def test_weak_budget_is_reported():
    f = intck_theorems(1, 3, 3)[0]
    r = prove_nested_formula(f, SearchBudget(depth=1, nodes=3))
    assert r.status is Status.BUDGET_EXHAUSTED


def test_prove_nested_rejects_input_goal():
    with pytest.raises(MalformedNested):
        prove_nested(N("p*"))


def test_random_axiom_instances_are_proved():
    for f in intck_theorems(60, 11):
        r = prove_nested_formula(f)
        assert r.proved and check_nested(r.derivation), f


_MODELS = [random_model(OLK, 4, s) for s in range(40)]


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_proved_goals_are_valid_in_olkhovikov_models(seed):
    f = random_formula(5, 3, True, seed)
    r = prove_nested_formula(f, SearchBudget(nodes=20_000))
    if r.proved:
        assert all(valid_in(m, f, OLK.profile) for m in _MODELS)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_diamond_free_theorems_carry_over(seed):
    f = random_formula(6, 3, False, seed)
    if prove_formula(f, LogicId.CONSTCKBOX).proved:
        assert prove_nested_formula(f).proved


# ---------------------------------------------------------------- formats


def test_json_round_trip():
    d = prove_nested_formula(parse("((p ?> q) -> (p > r)) -> p > (q -> r)")).derivation
    obj = nested_to_json(d)
    back = nested_from_json(json.dumps(obj))
    assert nested_to_json(back) == obj
    assert check_nested(back)


def test_latex_and_text_rendering():
    d = proof("(p & q)*, p^")
    tex = nested_to_latex(d)
    assert tex.startswith("\\begin{prooftree}") and "\\infer1" in tex and "\\bullet" in tex
    assert "[and*]" in render_nested(d)


# ---------------------------------------------------------------- identity


def test_generalized_init_atom():
    d = generalized_init(parse_context("{}"), Atom("p"))
    assert d.rule == "init" and d.conclusion == N("p*, p^")


def test_generalized_init_conjunction():
    d = generalized_init(parse_context("{}"), parse("p & q"))
    assert d.rule == "and^"
    assert {p.rule for p in d.premises} == {"and*"}
    assert all(n.rule in ("and^", "and*", "init") for n in d.nodes())


def test_generalized_init_box_in_bracket():
    d = generalized_init(parse_context("[r: {}]"), parse("p > q"))
    assert d.conclusion == N("[r: (p > q)*, (p > q)^]")
    assert d.rule == "box^" and d.premises[0].rule == "box*"
    assert check_nested(d)


@pytest.mark.parametrize("f", ["false", "(p ?> q) -> r > (s | false)", "(a > b) ?> ~c"])
@pytest.mark.parametrize("ctx", ["{}", "s*, [t: {}]", "[t: [u: v*, {}]]"])
def test_generalized_init_checks(f, ctx):
    d = generalized_init(parse_context(ctx), parse(f))
    assert check_nested(d) and d.cut_free


def test_generalized_init_rejects_output_context():
    with pytest.raises(MalformedNested):
        generalized_init(parse_context("q^, {}"), Atom("p"))


# ---------------------------------------------------------------- structural rules


def test_weakening_an_axiom():
    d = proof("p*, p^")
    w = weaken(d, (), N("q*"))
    assert w.conclusion == N("q*, p*, p^") and w.height == d.height and check_nested(w)


def test_weakening_keeps_height_and_rank():
    d = proof("(p ?> q) | (p ?> r) -> p ?> (q | r)^")
    w = apply_structural("w", d, path=(), extra=N("s*, [t: u*]"))
    assert check_nested(w) and w.height == d.height and w.rank == d.rank


def test_weakening_rejects_outputs():
    with pytest.raises(StructuralError):
        weaken(proof("p*, p^"), (), N("q^"))


def test_necessitation():
    d = proof("(p & q)*, q^")
    n = necessitate(d, parse("r"))
    assert n.conclusion == N("[r: (p & q)*, q^]")
    assert check_nested(n) and n.height == d.height


def test_inverting_the_last_rule_returns_its_premise():
    d = proof("(p & q)*, p^")
    assert d.rule == "and*"
    inv = invert(d, "and*", (), parse("p & q"))
    assert inv is d.premises[0] or inv.conclusion == d.premises[0].conclusion
    assert inv.height < d.height


def test_inversion_of_every_invertible_rule():
    checked = 0
    for f in intck_theorems(40, 2):
        for d in prove_nested_formula(f).derivation.nodes():
            for inst in nested_rule_instances(d.conclusion):
                picks = {"imp*": [1], "box*": [2], "and^": [0, 1], "or*": [0, 1]}.get(inst.rule, [0])
                if inst.rule not in ("and*", "and^", "or*", "imp^", "box^", "dia*", "imp*", "box*"):
                    continue
                for i in picks:
                    iv = apply_structural(
                        "invert", d, rule=inst.rule, path=inst.path, formula=inst.principal,
                        premise=i, bracket=inst.bracket,
                    )
                    assert iv.conclusion == inst.premises[i]
                    assert check_nested(iv) and iv.height <= d.height and iv.rank <= d.rank
                    checked += 1
    assert checked > 100


def test_non_invertible_rules_are_refused():
    d = proof("p*, (p | q)^")
    with pytest.raises(StructuralError):
        invert(d, "or^1", (), parse("p | q"))
    with pytest.raises(StructuralError):
        invert(proof("(p -> q)*, p*, q^"), "imp*", (), parse("p -> q"), premise=0)


def test_contraction_and_medial_keep_height():
    checked = 0
    for f in intck_theorems(30, 4):
        for d in prove_nested_formula(f).derivation.nodes():
            for path, comp in d.conclusion.walk():
                for g in set(comp.inputs):
                    c = contract(weaken(d, path, NestedSequent((g,))), path, g)
                    assert c.conclusion == d.conclusion and check_nested(c) and c.height <= d.height
                    checked += 1
                for k, b in enumerate(comp.brackets):
                    twin = Bracket(b.index, b.body.stripped())
                    w = weaken(d, path, NestedSequent(brackets=(twin,)))
                    m = apply_structural("m", w, path=path, k1=k, k2=len(comp.brackets))
                    assert check_nested(m) and m.height <= d.height
                    checked += 1
    assert checked > 50


def test_medial_needs_equal_indices():
    d = weaken(proof("[p: q*, q^]"), (), N("[r: ]"))
    with pytest.raises(StructuralError):
        medial(d, (), 0, 1)


def test_contraction_needs_two_copies():
    with pytest.raises(StructuralError):
        contract(proof("p*, p^"), (), Atom("p"))


# ---------------------------------------------------------------- rep and cut


def test_rep_with_equal_indices_is_identity():
    d1 = proof("p*, p^")
    d3 = proof("[p: (q & r)*, q^]")
    assert eliminate_rep(d1, d1, d3) is d3


def test_rep_through_box_uses_cuts_on_the_rep_formula():
    d1, d2 = proof("(p & q)*, (q & p)^"), proof("(q & p)*, (p & q)^")
    d3 = proof("((p & q) > r)*, [p & q: r^]")
    assert d3.rule == "box*"
    out = eliminate_rep(d1, d2, d3)
    assert out.conclusion == N("((p & q) > r)*, [q & p: r^]")
    assert check_nested(out, allow=["cut"])
    assert out.rank == max(d1.rank, d2.rank, d3.rank, weight(parse("p & q")) + 1)
    assert out.rule == "box*" and all(p.rule == "cut" for p in out.premises[:2])


def test_rep_commutes_past_other_rules():
    d1, d2 = proof("(p & q)*, (q & p)^"), proof("(q & p)*, (p & q)^")
    d3 = proof("[p & q: (r & s)*, r^]")
    assert d3.rule == "and*"
    out = eliminate_rep(d1, d2, d3)
    assert out.conclusion == N("[q & p: (r & s)*, r^]") and check_nested(out, allow=["cut"])


def test_rep_rejects_mismatched_premises():
    with pytest.raises(CutError):
        eliminate_rep(proof("p*, p^"), proof("q*, q^"), proof("[p: p*, p^]"))


def test_reduce_cut_axiomatic_left():
    d1 = proof("p*, p^")
    d2 = weaken(proof("p*, p^"), (), N("p*"))
    out = reduce_cut(d1, d2, Atom("p"))
    assert out.conclusion == N("p*, p^") and check_nested(out)


def test_reduce_cut_commutes_non_principal():
    xi = parse("q -> q")
    d1 = weaken(proof("(q -> q)^"), (), N("(p & r)*"))
    d2 = proof("(q -> q)*, (p & r)*, p^")
    out = reduce_cut(d1, d2, xi)
    assert out.conclusion == N("(p & r)*, p^") and check_nested(out, allow=["cut"])
    assert out.rank <= weight(xi)


def test_reduce_cut_box_principal_on_both_sides():
    xi, d1, d2 = box_example()
    assert (d1.rule, d2.rule) == ("box^", "box*")
    out = reduce_cut(d1, d2, xi)
    assert out.conclusion == N("[p: ((q -> q) -> s)*, s^]")
    assert check_nested(out, allow=["cut", "rep", "m", "c", "w"])
    assert {"rep", "m", "w", "cut"} <= out.rules_used
    assert out.rank <= weight(xi)
    assert all(weight(z) < weight(xi) for z in out.rep_formulas())


def test_reduce_cut_rejects_large_inner_cuts():
    xi, d1, d2 = box_example()
    big = parse("(a -> a) & (a -> a) & (a -> a)")
    left = weaken(proof(f"({big})^"), (), N("[p: ((q -> q) -> s)*]"))
    inner = cut_on(left, weaken(d1, (), N(f"({big})*")), big)
    assert inner.rank > weight(xi)
    with pytest.raises(CutError):
        reduce_cut(inner, d2, xi)


def test_eliminate_cut_leaves_cut_free_input_alone():
    d = proof("(p ?> q) | (p ?> r) -> p ?> (q | r)^")
    trace = []
    assert eliminate_cut(d, trace) is d and trace == [0]


def test_eliminate_cut_atomic():
    d = cut_on(proof("p*, p^"), weaken(proof("p*, p^"), (), N("p*")), Atom("p"))
    out = eliminate_cut(d)
    assert out.conclusion == d.conclusion and out.cut_free and check_nested(out)


def test_eliminate_cutbox_example():
    xi, d1, d2 = box_example()
    trace = []
    out = eliminate_cut(cut_on(d1, d2, xi), trace)
    assert out.conclusion == N("[p: ((q -> q) -> s)*, s^]")
    assert check_nested(out) and out.pure
    assert trace[0] == weight(xi) + 1 and trace[-1] == 0
    assert trace == sorted(trace, reverse=True)


def test_eliminate_cut_on_a_corpus():
    corpus = cut_corpus()
    assert len(corpus) >= 20
    assert any(c.premises[0].rank for c in corpus)
    for c in corpus:
        assert check_nested(c, allow=["cut"])
        trace = []
        out = eliminate_cut(c, trace)
        assert out.conclusion == c.conclusion
        assert out.rank == 0 and out.pure and check_nested(out)
        assert trace == sorted(trace, reverse=True) and trace[-1] == 0


def test_normalize_inlines_structural_nodes():
    leaf = proof("p*, p^")
    d = node(N("q*, p*, p^"), "w", [leaf], (), extra=N("q*"))
    out = normalize(d)
    assert out.conclusion == d.conclusion and out.pure
