"""Acceptance criteria.  Each test prints one PASS/FAIL line."""

from __future__ import annotations

import time

import pytest

from condikit.formula import And, Atom, parse, random_formula, to_text, weight
from condikit.hilbert import CHARACTERISTIC, SYSTEMS, AxiomId as A, axiom_instance, check_hilbert, compile_to_hilbert
from condikit.nested import check_nested, eliminate_cut, prove_nested_formula
from condikit.results import Status
from condikit.semantics import (
    ModelClass as MC,
    check_frame,
    find_countermodel,
    hereditary_check,
    logic_class,
    random_model,
    satisfies,
    valid_in,
)
from condikit.sequent import LogicId as L, check_derivation, prove_formula
from condikit.sequent.probes import ProbeKind, admissibility_probe, conservativity_probe

from derivations import FIXTURES
from nested_corpus import cut_corpus

ROW_LIMIT = 5.0
P, Q, R = Atom("p"), Atom("q"), Atom("r")
FLAT = [l for l in L if l is not L.INTCK]


@pytest.fixture
def report(capsys):
    def emit(n: int, title: str, failures: list, detail: str = "") -> None:
        status = "PASS" if not failures else "FAIL"
        with capsys.disabled():
            print(f"\n[criterion {n}] {status}  {title}  {detail}".rstrip())
            for f in failures[:10]:
                print(f"    {f}")
        assert not failures

    return emit


def inst(ax: A):
    return axiom_instance(ax, phi=P, psi=Q, chi=R)


def prove_any(f, logic):
    if logic is L.INTCK:
        return prove_nested_formula(f)
    return prove_formula(f, logic)


def derivation_ok(res, logic) -> bool:
    if logic is L.INTCK:
        return check_nested(res.derivation)
    return check_derivation(res.derivation, logic)


DEF_DIA = inst(A.DEF_DIA)
assert isinstance(DEF_DIA, And)

THEOREMS = (
    [(inst(a), l) for a in (A.CM_BOX, A.CC_BOX, A.CN_BOX) for l in (L.CONSTCKBOX, L.CONSTCK, L.INTCK)]
    + [(inst(a), L.CONSTCK) for a in (A.CN_DIA, A.CK_DIA, A.CW)]
    + [(inst(a), L.INTCK) for a in (A.CM_DIA, A.CC_DIA, A.CN_DIA, A.CW, A.CFS)]
    + [(inst(A.ID_BOX), L.CCKID), (inst(A.MP_BOX), L.CCKMP), (inst(A.MP_DIA), L.CCKMP)]
    + [(inst(A.CEM_DIA), L.CCKCEM), (DEF_DIA.left, L.CK), (DEF_DIA.right, L.CK)]
)


def test_theorem_matrix(report):
    failures = []
    for f, logic in THEOREMS:
        t0 = time.perf_counter()
        res = prove_any(f, logic)
        dt = time.perf_counter() - t0
        if not res.proved or not derivation_ok(res, logic) or dt > ROW_LIMIT:
            failures.append(f"{to_text(f)} in {logic.value}: {res.status.value}, {dt:.2f}s")
    report(1, "theorem matrix", failures, f"{len(THEOREMS)} rows proved")


def test_non_theorem_matrix(report):
    failures = []

    def expect(f, logic, status):
        res = prove_any(f, logic)
        if res.status is not status:
            failures.append(f"{to_text(f)} in {logic.value}: {res.status.value}, wanted {status.value}")

    def countermodel(f, cls, n):
        found = find_countermodel(f, cls, max_worlds=n)
        if found is None:
            failures.append(f"no countermodel for {to_text(f)} within {n} worlds")
            return None
        m, w = found
        if m.size > n or not check_frame(m, cls) or satisfies(m, w, f, cls.profile):
            failures.append(f"countermodel for {to_text(f)} does not re-verify")
        return m

    sep = parse("~~(true > false) -> (true > false)")
    expect(sep, L.CONSTCKBOX, Status.REFUTED)
    expect(sep, L.INTCK, Status.PROVED)

    em = parse("p | ~p")
    expect(em, L.CONSTCK, Status.REFUTED)
    countermodel(em, MC.CCM, 2)

    refuted = [d for d in (DEF_DIA.left, DEF_DIA.right) if prove_formula(d, L.CONSTCK).refuted]
    if not refuted:
        failures.append("neither direction of def⟐ refuted in constck")
    for d in refuted:
        countermodel(d, MC.CCM, 4)

    pp = parse("p > p")
    expect(pp, L.CONSTCK, Status.REFUTED)
    m = countermodel(pp, MC.CCM, 4)
    if m is not None and check_frame(m, MC.CCM_ID):
        failures.append("countermodel to p > p satisfies (id)")
    bad = [s for s in range(200) if not valid_in(random_model(MC.CCM_ID, 4, s), pp, MC.CCM_ID.profile)]
    if bad:
        failures.append(f"p > p fails on ccm_id models with seeds {bad[:5]}")
    report(2, "non-theorem matrix", failures, f"def⟐ directions refuted: {len(refuted)}")


SOUNDNESS_LOGICS = [L.CONSTCKBOX, L.CONSTCK, L.CCKID, L.CCKMP, L.CCKMPID, L.INTCK]


def test_soundness(report):
    failures, proved = [], 0
    for logic in SOUNDNESS_LOGICS:
        cls = logic_class(logic)
        models = [random_model(cls, 4, 10_000 + i) for i in range(100)]
        for seed in range(500):
            f = random_formula(4, 3, SYSTEMS[logic].diamonds, seed)
            if not prove_any(f, logic).proved:
                continue
            proved += 1
            for i, m in enumerate(models):
                if not valid_in(m, f, cls.profile):
                    failures.append(f"{logic.value}: {to_text(f)} fails on model {10_000 + i}")
                    break
    report(3, "soundness on random models", failures, f"{proved} proved formulas x 100 models")


def test_structural_probes(report):
    failures, skipped = [], 0
    for kind in ProbeKind:
        for logic in FLAT:
            r = admissibility_probe(kind, logic, 50, seed=2024)
            skipped += r.skipped
            if r.counterexamples:
                failures.append(f"{kind.value} in {logic.value}: {r.counterexamples[0]}")
            if kind is not ProbeKind.CUT and r.height_increases:
                failures.append(f"{kind.value} in {logic.value} raised height: {r.height_increases[0]}")
    report(4, "weakening, contraction and cut probes", failures, f"{3 * len(FLAT)} probes, {skipped} skipped trials")


def test_cut_elimination(report):
    failures = []
    corpus = cut_corpus()
    if len(corpus) < 20:
        failures.append(f"corpus has only {len(corpus)} derivations")
    for i, d in enumerate(corpus):
        trace = []
        out = eliminate_cut(d, trace)
        if out.conclusion != d.conclusion or out.rank or not out.pure or not check_nested(out):
            failures.append(f"derivation {i}: bad output")
        if trace != sorted(trace, reverse=True) or trace[-1] != 0:
            failures.append(f"derivation {i}: rank trace {trace}")
    report(5, "cut elimination", failures, f"{len(corpus)} derivations")


def test_syntactic_equivalence(report):
    failures, compiled = [], 0
    for f, logic in THEOREMS:
        if logic is L.INTCK:
            continue
        proof = compile_to_hilbert(prove_formula(f, logic).derivation, logic)
        compiled += 1
        if proof.conclusion != f or not check_hilbert(proof, logic):
            failures.append(f"{to_text(f)} in {logic.value} does not compile to a checked proof")
    for d, logic in FIXTURES:
        if not check_derivation(d, logic):
            failures.append(f"fixture {d.conclusion} rejected in {logic.value}")
        res = prove_formula(d.conclusion.suc[0], logic)
        if not res.proved or not check_hilbert(compile_to_hilbert(res.derivation, logic), logic):
            failures.append(f"fixture {d.conclusion} not reproduced in {logic.value}")
    for logic in FLAT:
        for ax in CHARACTERISTIC[logic]:
            if not prove_formula(inst(ax), logic).proved:
                failures.append(f"{ax.value} not proved in {logic.value}")
    report(6, "syntactic equivalence", failures, f"{compiled} matrix proofs, {len(FIXTURES)} fixtures")


def test_conservativity(report):
    verdicts, seed = [], 0
    while len(verdicts) < 300:
        f = random_formula(4, 3, False, seed)
        seed += 1
        verdicts.append((f, conservativity_probe(f)))
    disagree = [to_text(f) for f, v in verdicts if v is False]
    inconclusive = sum(v is None for _, v in verdicts)
    failures = [f"verdicts differ on {f}" for f in disagree]
    if inconclusive > 30:
        failures.append(f"{inconclusive} of 300 pairs inconclusive")
    report(7, "conservativity", failures, f"300 pairs, {inconclusive} inconclusive")


def test_hereditary(report):
    failures = []
    for cls in MC:
        diamonds = cls.profile.diam is not None
        for seed in range(200):
            m = random_model(cls, 4, seed)
            f = random_formula(4, 3, diamonds, seed)
            if not hereditary_check(m, cls.profile, f):
                failures.append(f"{cls.value}: {to_text(f)} on model {seed}")
    report(8, "hereditary property", failures, f"{len(MC)} classes x 200 pairs")


def test_parser_round_trip(report):
    failures = []
    for seed in range(1000):
        f = random_formula(6, 3, True, seed)
        text = to_text(f)
        g = parse(text)
        if g != f or to_text(g) != text or weight(g) != weight(f):
            failures.append(text)
    report(9, "parser round trip", failures, "1000 formulas")
