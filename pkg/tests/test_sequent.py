from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from condikit.formula import parse, random_formula
from condikit.results import SearchBudget, Status
from condikit.sequent import (
    LogicId,
    MalformedSequent,
    SeqDerivation,
    Sequent,
    check_derivation,
    find_error,
    from_json,
    min_height,
    parse_sequent,
    prove,
    prove_formula,
    rule_instances,
    to_json,
    to_latex_tree,
)
from condikit.sequent.probes import ProbeKind, admissibility_probe, conservativity_probe

from derivations import CK_DIA, CM_BOX, CN_DIA, FIXTURES, ID_BOX, MP_BOX, node

L = LogicId


@pytest.mark.parametrize("d,logic", FIXTURES)
def test_transcribed_derivations_check(d, logic):
    assert find_error(d, logic) is None


@pytest.mark.parametrize("d,logic", FIXTURES)
def test_prover_reproduces_transcribed_conclusions(d, logic):
    r = prove(d.conclusion, logic)
    assert r.proved
    assert check_derivation(r.derivation, logic)
    assert r.derivation.conclusion == d.conclusion


def test_deleted_premise_is_rejected():
    broken = SeqDerivation(CM_BOX.premises[0].conclusion, "andR", CM_BOX.premises[0].premises[:1])
    assert not check_derivation(broken, L.CONSTCK)
    path, _ = find_error(SeqDerivation(CM_BOX.conclusion, "impR", (broken,)), L.CONSTCK)
    assert path == (0,)


def test_rule_outside_system_is_rejected():
    assert not check_derivation(CN_DIA, L.CONSTCKBOX)
    assert not check_derivation(ID_BOX, L.CONSTCK)
    assert not check_derivation(MP_BOX, L.CONSTCK)


def test_wrong_context_is_rejected():
    bad = node("p > q, p => q", "mp_box", node("p > q, p => p", "init"), node("p > q, q => q", "init"))
    assert not check_derivation(bad, L.CCKMP)


def test_rule_instances_examples():
    insts = rule_instances(parse_sequent("p > q => p > q"), L.CONSTCK)
    cb = [i for i in insts if i.rule == "cb" and len(i.boxes) == 1]
    assert [list(map(str, i.premises)) for i in cb] == [["p => p", "p => p", "q => q"]]
    insts = rule_instances(parse_sequent("=> p > true"), L.CONSTCKBOX)
    assert [list(map(str, i.premises)) for i in insts if i.rule == "cb"] == [["=> true"]]
    insts = rule_instances(parse_sequent("q, false => r"), L.CONSTCK)
    assert any(i.rule == "botL" and not i.premises for i in insts)


def test_conditional_instances_enumerate_every_selection():
    goal = parse_sequent("p > q, r > s => t > u")
    cbs = [i for i in rule_instances(goal, L.CONSTCK) if i.rule == "cb"]
    assert sorted(len(i.boxes) for i in cbs) == [0, 1, 1, 2]
    goal = parse_sequent("p ?> q, r ?> s => t ?> u")
    cds = [i for i in rule_instances(goal, L.CCKCEM) if i.rule == "cd_cem"]
    assert len(cds) == 4


def test_malformed_goals():
    with pytest.raises(MalformedSequent):
        rule_instances(parse_sequent("=> p, q"), L.CONSTCK)
    with pytest.raises(MalformedSequent):
        rule_instances(parse_sequent("=> p ?> q"), L.CONSTCKBOX)
    rule_instances(parse_sequent("=> p, q"), L.CK)


@pytest.mark.parametrize(
    "text,logic,status",
    [
        ("~(p ?> false)", L.CONSTCK, Status.PROVED),
        ("p | ~p", L.CONSTCK, Status.REFUTED),
        ("(p ?> q) <-> ~(p > ~q)", L.CK, Status.PROVED),
        ("p > p", L.CCKID, Status.PROVED),
        ("p & q -> (p ?> q)", L.CCKMP, Status.PROVED),
        ("(p ?> q) & (p ?> r) -> (p ?> q & r)", L.CCKCEM, Status.PROVED),
        ("~~(true > false) -> (true > false)", L.CONSTCKBOX, Status.REFUTED),
        ("~~(true > false) -> (true > false)", L.CONSTCK, Status.REFUTED),
        ("p > p", L.CONSTCK, Status.REFUTED),
        ("(p > q) -> (p -> q)", L.CONSTCK, Status.REFUTED),
        ("p | ~p", L.CK, Status.PROVED),
        ("((p -> q) -> p) -> p", L.CK, Status.PROVED),
        ("((p -> q) -> p) -> p", L.CONSTCK, Status.REFUTED),
        ("~~(p | ~p)", L.CONSTCK, Status.PROVED),
    ],
)
def test_prove_examples(text, logic, status):
    r = prove_formula(parse(text), logic)
    assert r.status is status
    if r.proved:
        assert check_derivation(r.derivation, logic)


def test_budget_exhaustion_is_reported():
    r = prove_formula(parse("((p -> q) -> p) -> p"), L.CONSTCK, SearchBudget(depth=40, nodes=2))
    assert r.status is Status.BUDGET_EXHAUSTED
    r = prove_formula(parse("(p & q) & r -> r & (q & p)"), L.CONSTCK, SearchBudget(depth=1))
    assert r.status is Status.BUDGET_EXHAUSTED


def test_json_round_trip():
    d = prove_formula(parse("(p > (q -> r)) -> (p ?> q) -> (p ?> r)"), L.CONSTCK).derivation
    blob = json.dumps(to_json(d))
    assert from_json(blob) == d
    obj = json.loads(blob)
    assert set(obj) == {"rule", "sequent", "premises"}
    assert set(obj["sequent"]) == {"ant", "suc"}


def test_latex_mentions_every_rule():
    tex = to_latex_tree(CK_DIA)
    assert tex.count(r"\infer") == CK_DIA.size()
    assert r"\infer0" in tex and r"\infer5" in tex


def test_sequent_parser():
    s = parse_sequent("p, q & r => r")
    assert s == Sequent((parse("q & r"), parse("p")), (parse("r"),))
    assert parse_sequent("p -> p") == Sequent((), (parse("p -> p"),))
    assert parse_sequent("p =>") == Sequent((parse("p"),), ())


def test_min_height_examples():
    assert min_height(parse_sequent("p => p"), L.CONSTCK).height == 0
    assert min_height(parse_sequent("p & q => q & p"), L.CONSTCK).height == 2
    assert min_height(parse_sequent("=> p | ~p"), L.CONSTCK, limit=6) is None


@pytest.mark.parametrize("kind", list(ProbeKind))
def test_probes_small(kind):
    rep = admissibility_probe(kind, L.CONSTCK, 10, 1)
    assert rep.ok and rep.skipped < 10


def test_probe_cut_identity_instance():
    left = parse_sequent("p => p")
    assert prove(left, L.CONSTCK).proved


def test_conservativity_examples():
    assert conservativity_probe(parse("p > true")) is True
    assert conservativity_probe(parse("~~(true > false) -> (true > false)")) is True
    assert conservativity_probe(parse("p -> p")) is True
    with pytest.raises(ValueError):
        conservativity_probe(parse("p ?> q"))


seeds = st.integers(0, 2**32)
single = [L.CONSTCKBOX, L.CONSTCK, L.CCKID, L.CCKMP, L.CCKMPID, L.CCKCEM, L.CK]


@settings(max_examples=150, deadline=None)
@given(seeds, st.sampled_from(single))
def test_proofs_always_check(seed, logic):
    f = random_formula(5, 3, logic.diamonds, seed)
    r = prove_formula(f, logic)
    assert r.conclusive
    if r.proved:
        assert check_derivation(r.derivation, logic)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_classical_extends_constructive(seed):
    f = random_formula(4, 2, True, seed)
    if prove_formula(f, L.CONSTCK).proved:
        assert prove_formula(f, L.CK).proved


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from([L.CONSTCK, L.CCKID, L.CCKMP]))
def test_extensions_extend_constck(seed, logic):
    f = random_formula(4, 2, True, seed)
    if prove_formula(f, L.CONSTCK).proved:
        assert prove_formula(f, logic).proved


INVERTIBLE = {
    "andL": [0],
    "andR": [0, 1],
    "orL": [0, 1],
    "impR": [0],
    "impL": [1],
}


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_invertible_rules_preserve_height(seed):
    f = random_formula(4, 2, True, seed)
    goal = Sequent((), (f,))
    d = min_height(goal, L.CONSTCK, limit=8)
    if d is None:
        return
    for inst in rule_instances(goal, L.CONSTCK):
        for idx in INVERTIBLE.get(inst.rule, []):
            prem = inst.premises[idx]
            pd = min_height(prem, L.CONSTCK, limit=d.height)
            assert pd is not None and pd.height <= d.height
