"""Derived conditional rules, their macro templates, and the compiler
from flat sequent derivations to Hilbert proofs.

A sequent is read as the formula ``conj(ant) -> disj(suc)``, or just
``disj(suc)`` when the antecedent is empty, with the empty disjunction
read as false.  Conjunctions and disjunctions fold to the left over the
sorted multiset.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..formula import BOT, TOP, And, CondBox, CondDiam, Formula, Imp, conj, disj, iff, neg
from ..sequent.calculus import LogicId, SeqDerivation, Sequent, find_error, match_instance
from .builder import (
    Env,
    Term,
    and_intro,
    ax,
    cases,
    conj_lam,
    double_negation,
    efq,
    excluded_middle,
    fst,
    given,
    identity,
    inject,
    inl,
    inr,
    lam,
    linearize,
    mp,
    pack,
    rule,
    snd,
    split,
    unpack,
)
from .proof import HilbertProof
from .schemas import AxiomId


def iota(s: Sequent) -> Formula:
    right = disj(s.suc)
    return Imp(conj(s.ant), right) if s.ant else right


# ------------------------------------------------------------ derived rules


def rm_box(phi: Formula, imp: Term) -> Term:
    """From A -> B, (phi > A) -> (phi > B): RC and CM for would."""
    a, b = imp.formula.left, imp.formula.right
    if a == b:
        return identity(CondBox(phi, a))
    ab = And(a, b)
    eq = and_intro(lam(a, lambda x: and_intro(x, mp(imp, x))), ax(AxiomId.AND_E1, phi=a, psi=b))
    rc = rule("RC⊡", [eq], iff(CondBox(phi, a), CondBox(phi, ab)))
    cm = ax(AxiomId.CM_BOX, phi=phi, psi=a, chi=b)
    return lam(CondBox(phi, a), lambda x: snd(mp(cm, mp(fst(rc), x))))


def necessitate(phi: Formula, t: Term) -> Term:
    """From a closed proof of A, phi > A (CN and monotonicity)."""
    if t.formula == TOP:
        return ax(AxiomId.CN_BOX, phi=phi)
    return mp(rm_box(phi, mp(ax(AxiomId.K, phi=t.formula, psi=TOP), t)), ax(AxiomId.CN_BOX, phi=phi))


def rm_dia(phi: Formula, imp: Term) -> Term:
    """From A -> B, (phi ?> A) -> (phi ?> B): necessitate A -> B, then CK for might."""
    a, b = imp.formula.left, imp.formula.right
    if a == b:
        return identity(CondDiam(phi, a))
    ck = ax(AxiomId.CK_DIA, phi=phi, psi=a, chi=b)
    return mp(ck, necessitate(phi, imp))


def cw(d: Term, b: Term) -> Term:
    """From phi ?> D and phi > B, phi ?> D & B, derived from CK for might."""
    phi, dd, bb = d.formula.left, d.formula.right, b.formula.right
    lemma = lam(bb, lambda y: lam(dd, lambda x: and_intro(x, y)))
    boxed = mp(rm_box(phi, lemma), b)
    return mp(mp(ax(AxiomId.CK_DIA, phi=phi, psi=dd, chi=And(dd, bb)), boxed), d)


def ra_box(eq: Optional[Term], phi: Formula, rho: Formula, sigma: Formula) -> Term:
    """(rho > sigma) -> (phi > sigma) from a proof of phi <-> rho."""
    if phi == rho:
        return identity(CondBox(phi, sigma))
    r = rule("RA⊡", [eq], iff(CondBox(phi, sigma), CondBox(rho, sigma)))
    return snd(r)


def ra_dia(eq: Optional[Term], phi: Formula, rho: Formula, sigma: Formula) -> Term:
    """(rho ?> sigma) -> (phi ?> sigma) from a proof of phi <-> rho."""
    if phi == rho:
        return identity(CondDiam(phi, sigma))
    r = rule("RA⟐", [eq], iff(CondDiam(phi, sigma), CondDiam(rho, sigma)))
    return snd(r)


def cc_fold(phi: Formula, terms: list[Term]) -> Term:
    """phi > conj(items) from phi > item for each item."""
    if not terms:
        return ax(AxiomId.CN_BOX, phi=phi)
    acc = terms[0]
    for t in terms[1:]:
        acc = mp(ax(AxiomId.CC_BOX, phi=phi, psi=acc.formula.right, chi=t.formula.right), and_intro(acc, t))
    return acc


def cem_fold(phi: Formula, terms: list[Term]) -> Term:
    acc = terms[0]
    for t in terms[1:]:
        acc = mp(ax(AxiomId.CEM_DIA, phi=phi, psi=acc.formula.right, chi=t.formula.right), and_intro(acc, t))
    return acc


MainFn = Callable[[Env], Term]


def box_core(phi: Formula, boxed: list[Term], goal: Formula, main: MainFn) -> Term:
    """phi > goal from proofs of phi > sigma_i and a main step sigmas |- goal."""
    items = [t.formula.right for t in boxed]
    lemma = conj_lam(items, main)
    return mp(rm_box(phi, lemma), cc_fold(phi, boxed))


def dia_core(phi: Formula, boxed: list[Term], dias: list[Term], goal: Formula, main: MainFn) -> Term:
    """phi ?> goal from phi > sigma_i, phi ?> psi_j and a main step sigmas, psis |- goal."""
    ditems = [t.formula.right for t in dias]
    d = cem_fold(phi, dias)
    if not boxed:
        return mp(rm_dia(phi, conj_lam(ditems, main)), d)
    bitems = [t.formula.right for t in boxed]
    joined = cw(d, cc_fold(phi, boxed))

    def body(x: Term) -> Term:
        env = unpack(fst(x), ditems)
        unpack(snd(x), bitems, env)
        return main(env)

    lemma = lam(joined.formula.right, body)
    return mp(rm_dia(phi, lemma), joined)


# ------------------------------------------------------------ macro templates

MACROS = ("RM⊡", "RM⟐", "CW", "cb", "cd", "cbd", "cb_id", "cd_id", "cbd_id", "cd_cem", "cbd_cem", "mp_box", "mp_dia")


def _need(inst: dict, key: str):
    if key not in inst:
        raise KeyError(f"metavariable {key!r} is unbound")
    return inst[key]


def macro_expand(name: str, inst: dict) -> HilbertProof:
    """Expand a derived rule into a Hilbert proof from its premises.

    Keys of ``inst`` by template:

    * ``RM⊡``/``RM⟐``: phi, psi, theta. From psi -> theta.
    * ``CW``: phi, psi, chi. No premises.
    * ``cb``, ``cb_id``: phi, psi, rhos, sigmas.  From phi <-> rho_i and
      sigmas (with phi for the identity form) -> psi.
    * ``cd``, ``cd_id``, ``cbd``, ``cbd_id``: phi, psi, rhos, sigmas, and
      eta, theta for cd.  The main premise lists sigmas, then phi for the
      identity forms, then psi.
    * ``cd_cem``, ``cbd_cem``: as cd, plus ``others``, a list of (phi_j, psi_j)
      might-conditionals.  The main premise lists sigmas then every psi.
    * ``mp_box``: phi, psi, chi.  From (phi > psi) -> phi and (phi > psi) & psi -> chi.
    * ``mp_dia``: xi, phi, psi.  From xi -> phi and xi -> psi.

    The conclusion is the formula reading of the sequent rule's conclusion
    with the context left out.
    """
    t = _macro_term(name, dict(inst))
    return linearize(t)


def macro_premises(name: str, inst: dict) -> list[Formula]:
    return [g.formula for g in _macro_givens(name, dict(inst))]


def _macro_givens(name: str, inst: dict) -> list[Term]:
    if name in ("RM⊡", "RM⟐"):
        return [given(Imp(_need(inst, "psi"), _need(inst, "theta")))]
    if name == "CW":
        return []
    if name == "mp_box":
        b = CondBox(_need(inst, "phi"), _need(inst, "psi"))
        return [given(Imp(b, inst["phi"])), given(Imp(And(b, inst["psi"]), _need(inst, "chi")))]
    if name == "mp_dia":
        xi = _need(inst, "xi")
        return [given(Imp(xi, _need(inst, "phi"))), given(Imp(xi, _need(inst, "psi")))]
    if name not in MACROS:
        raise ValueError(f"unknown macro {name!r}")
    phi, psi = _need(inst, "phi"), _need(inst, "psi")
    rhos, sigmas = list(_need(inst, "rhos")), list(_need(inst, "sigmas"))
    if len(rhos) != len(sigmas):
        raise ValueError("rhos and sigmas must have the same length")
    out = [given(iff(phi, r)) for r in rhos]
    others = list(inst.get("others", ())) if name.endswith("_cem") else []
    out += [given(iff(phi, o[0])) for o in others]
    if name.startswith("cd"):
        out.append(given(iff(phi, _need(inst, "eta"))))
    extra = [phi] if name.endswith("_id") else []
    if name.startswith("cb") and not name.startswith("cbd"):
        items = sigmas + extra
        goal = psi
    else:
        items = sigmas + extra + [psi] + [o[1] for o in others]
        goal = _need(inst, "theta") if name.startswith("cd") else BOT
    out.append(given(Imp(conj(items), goal) if items else goal))
    return out


def _macro_term(name: str, inst: dict) -> Term:
    gs = _macro_givens(name, inst)
    if name == "RM⊡":
        return rm_box(_need(inst, "phi"), gs[0])
    if name == "RM⟐":
        return rm_dia(_need(inst, "phi"), gs[0])
    if name == "CW":
        phi, psi, chi = _need(inst, "phi"), _need(inst, "psi"), _need(inst, "chi")
        premise = And(CondDiam(phi, psi), CondBox(phi, chi))
        return lam(premise, lambda x: cw(fst(x), snd(x)))
    if name == "mp_box":
        p1, p2 = gs
        phi, psi = inst["phi"], inst["psi"]
        b = CondBox(phi, psi)
        return lam(b, lambda x: mp(p2, and_intro(x, mp(mp(ax(AxiomId.MP_BOX, phi=phi, psi=psi), x), mp(p1, x)))))
    if name == "mp_dia":
        p1, p2 = gs
        phi, psi = inst["phi"], inst["psi"]
        return lam(
            inst["xi"],
            lambda x: mp(ax(AxiomId.MP_DIA, phi=phi, psi=psi), and_intro(mp(p1, x), mp(p2, x))),
        )
    phi, psi = inst["phi"], inst["psi"]
    rhos, sigmas = list(inst["rhos"]), list(inst["sigmas"])
    others = list(inst.get("others", ())) if name.endswith("_cem") else []
    identity_form = name.endswith("_id")
    n = len(rhos)
    eqs, rest = gs[:n], gs[n:]
    oeqs, rest = rest[: len(others)], rest[len(others):]
    main = rest[-1]
    boxes = [CondBox(r, s) for r, s in zip(rhos, sigmas)]
    dias = [CondDiam(phi, psi)] + [CondDiam(o[0], o[1]) for o in others]
    is_cb = name in ("cb", "cb_id")
    premise_items = boxes + ([] if is_cb else dias)

    def main_fn(env: Env) -> Term:
        order = sigmas + ([phi] if identity_form else []) + ([] if is_cb else [psi] + [o[1] for o in others])
        if not order:
            return main
        return mp(main, pack(env, order))

    def body(env: Env) -> Term:
        boxed = [mp(ra_box(e, phi, b.left, b.right), env[b]) for e, b in zip(eqs, boxes)]
        if identity_form:
            boxed.append(ax(AxiomId.ID_BOX, phi=phi))
        if is_cb:
            return box_core(phi, boxed, psi, main_fn)
        dterms = [env[dias[0]]] + [mp(ra_dia(e, phi, d.left, d.right), env[d]) for e, d in zip(oeqs, dias[1:])]
        if name.startswith("cd"):
            theta, eta = inst["theta"], inst["eta"]
            t = dia_core(phi, boxed, dterms, theta, main_fn)
            return mp(_ra_dia_forward(rest[0], phi, eta, theta), t)
        t = dia_core(phi, boxed, dterms, BOT, main_fn)
        return mp(ax(AxiomId.CN_DIA, phi=phi), t)

    if not premise_items:
        return body({})
    return conj_lam(premise_items, body)


def _ra_dia_forward(eq: Term, phi: Formula, eta: Formula, theta: Formula) -> Term:
    """(phi ?> theta) -> (eta ?> theta) from phi <-> eta."""
    if phi == eta:
        return identity(CondDiam(phi, theta))
    return fst(rule("RA⟐", [eq], iff(CondDiam(phi, theta), CondDiam(eta, theta))))


# ------------------------------------------------------------ compiler


class CompileError(ValueError):
    pass


def compile_to_hilbert(d: SeqDerivation, logic: LogicId) -> HilbertProof:
    """A Hilbert proof of the formula reading of ``d``'s conclusion."""
    logic = LogicId(logic)
    err = find_error(d, logic)
    if err is not None:
        raise CompileError(f"not a valid {logic.value} derivation at {err[0]}: {err[1]}")
    return linearize(_Compiler(logic).term(d))


class _Compiler:
    def __init__(self, logic: LogicId):
        self.logic = logic
        self.memo: dict[Sequent, Term] = {}

    def term(self, d: SeqDerivation) -> Term:
        hit = self.memo.get(d.conclusion)
        if hit is None:
            hit = self._compile(d)
            assert hit.formula == iota(d.conclusion)
            self.memo[d.conclusion] = hit
        return hit

    def _compile(self, d: SeqDerivation) -> Term:
        s = d.conclusion
        inst = match_instance(d, self.logic)
        # Side premises may come in any order; follow the instance's order.
        by_seq = {p.conclusion: self.term(p) for p in d.premises}
        prem_seqs = list(inst.premises)
        prem = [by_seq[q] for q in prem_seqs]
        handler = getattr(self, "_r_" + d.rule)

        def body(env: Env) -> Term:
            return handler(s, inst, env, prem, prem_seqs)

        if s.ant:
            return conj_lam(s.ant, body)
        return body({})

    # helpers

    @staticmethod
    def use(t: Term, seq: Sequent, env: Env) -> Term:
        return mp(t, pack(env, seq.ant)) if seq.ant else t

    @staticmethod
    def deliver(f: Formula, t: Term, s: Sequent) -> Term:
        return inject(t, s.suc, s.suc.index(f))

    def redirect(self, s: Sequent, active: Formula, handle: Callable[[Term], Term]):
        """Continuation for splitting a premise succedent: members of the
        conclusion succedent go straight through, ``active`` goes to ``handle``."""

        def k(f: Formula, t: Term) -> Term:
            if f in s.suc:
                return self.deliver(f, t, s)
            if f != active:
                raise CompileError(f"unexpected succedent member {f}")
            return handle(t)

        return k

    # propositional rules

    def _r_init(self, s, inst, env, prem, ps):
        return self.deliver(inst.principal, env[inst.principal], s)

    def _r_botL(self, s, inst, env, prem, ps):
        return efq(env[BOT], disj(s.suc))

    def _r_andL(self, s, inst, env, prem, ps):
        f = inst.principal
        env = dict(env)
        env.setdefault(f.left, fst(env[f]))
        env.setdefault(f.right, snd(env[f]))
        return self.use(prem[0], ps[0], env)

    def _r_orL(self, s, inst, env, prem, ps):
        f = inst.principal
        goal = disj(s.suc)
        return cases(
            env[f],
            goal,
            lambda x: self.use(prem[0], ps[0], {**env, f.left: x}),
            lambda y: self.use(prem[1], ps[1], {**env, f.right: y}),
        )

    def _r_andR(self, s, inst, env, prem, ps):
        f = inst.principal
        goal = disj(s.suc)
        left = self.use(prem[0], ps[0], env)

        def with_a(a: Term) -> Term:
            right = self.use(prem[1], ps[1], env)
            return split(right, ps[1].suc, goal, self.redirect(s, f.right, lambda b: self.deliver(f, and_intro(a, b), s)))

        return split(left, ps[0].suc, goal, self.redirect(s, f.left, with_a))

    def _r_orR1(self, s, inst, env, prem, ps):
        f = inst.principal
        return self.deliver(f, inl(self.use(prem[0], ps[0], env), f.right), s)

    def _r_orR2(self, s, inst, env, prem, ps):
        f = inst.principal
        return self.deliver(f, inr(f.left, self.use(prem[0], ps[0], env)), s)

    def _r_orR(self, s, inst, env, prem, ps):
        f = inst.principal
        goal = disj(s.suc)
        t = self.use(prem[0], ps[0], env)

        def k(g: Formula, u: Term) -> Term:
            if g in s.suc:
                return self.deliver(g, u, s)
            if g == f.left:
                return self.deliver(f, inl(u, f.right), s)
            return self.deliver(f, inr(f.left, u), s)

        return split(t, ps[0].suc, goal, k)

    def _r_impR(self, s, inst, env, prem, ps):
        f = inst.principal
        if not self.logic.classical:
            return self.deliver(f, lam(f.left, lambda x: self.use(prem[0], ps[0], {**env, f.left: x})), s)
        goal = disj(s.suc)

        def holds(a: Term) -> Term:
            t = self.use(prem[0], ps[0], {**env, f.left: a})
            weak = lambda b: self.deliver(f, mp(ax(AxiomId.K, phi=b.formula, psi=f.left), b), s)
            return split(t, ps[0].suc, goal, self.redirect(s, f.right, weak))

        def fails(n: Term) -> Term:
            return self.deliver(f, lam(f.left, lambda a: efq(mp(n, a), f.right)), s)

        return cases(excluded_middle(f.left), goal, holds, fails)

    def _r_impL(self, s, inst, env, prem, ps):
        f = inst.principal
        goal = disj(s.suc)
        first = self.use(prem[0], ps[0], env)

        def cont(a: Term) -> Term:
            return self.use(prem[1], ps[1], {**env, f.right: mp(env[f], a)})

        if not self.logic.classical:
            return cont(first)
        return split(first, ps[0].suc, goal, self.redirect(s, f.left, cont))

    # conditional rules

    def _split_premises(self, inst, prem):
        nb, nd = len(inst.boxes), len(inst.diamonds)
        box_eqs = [and_intro(prem[2 * i], prem[2 * i + 1]) for i in range(nb)]
        off = 2 * nb
        dia_eqs = [and_intro(prem[off + 2 * i], prem[off + 2 * i + 1]) for i in range(nd)]
        off += 2 * nd
        return box_eqs, dia_eqs, prem[off:]

    def _boxed(self, phi, inst, env, box_eqs):
        return [mp(ra_box(e, phi, b.left, b.right), env[b]) for e, b in zip(box_eqs, inst.boxes)]

    def _cb(self, s, inst, env, prem, ps, identity_form: bool):
        f = inst.principal
        phi = f.left
        box_eqs, _, (main,) = self._split_premises(inst, prem)
        boxed = self._boxed(phi, inst, env, box_eqs)
        if identity_form:
            boxed.append(ax(AxiomId.ID_BOX, phi=phi))
        t = box_core(phi, boxed, f.right, lambda e: self.use(main, ps[-1], e))
        return self.deliver(f, t, s)

    def _r_cb(self, s, inst, env, prem, ps):
        return self._cb(s, inst, env, prem, ps, False)

    def _r_cb_id(self, s, inst, env, prem, ps):
        return self._cb(s, inst, env, prem, ps, True)

    def _cd(self, s, inst, env, prem, ps, identity_form: bool, target: bool):
        f = inst.principal
        phi = f.left
        box_eqs, dia_eqs, rest = self._split_premises(inst, prem)
        boxed = self._boxed(phi, inst, env, box_eqs)
        if identity_form:
            boxed.append(ax(AxiomId.ID_BOX, phi=phi))
        dterms = [env[f]] + [mp(ra_dia(e, phi, d.left, d.right), env[d]) for e, d in zip(dia_eqs, inst.diamonds)]
        main = rest[-1]
        use_main = lambda e: self.use(main, ps[-1], e)
        if target:
            t = inst.target
            eq = and_intro(rest[0], rest[1])
            reached = dia_core(phi, boxed, dterms, t.right, use_main)
            return self.deliver(t, mp(_ra_dia_forward(eq, phi, t.left, t.right), reached), s)
        bottom = mp(ax(AxiomId.CN_DIA, phi=phi), dia_core(phi, boxed, dterms, BOT, use_main))
        return efq(bottom, disj(s.suc))

    def _r_cd(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, False, True)

    def _r_cd_id(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, True, True)

    def _r_cd_cem(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, False, True)

    def _r_cbd(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, False, False)

    def _r_cbd_id(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, True, False)

    def _r_cbd_cem(self, s, inst, env, prem, ps):
        return self._cd(s, inst, env, prem, ps, False, False)

    def _r_mp_box(self, s, inst, env, prem, ps):
        f = inst.principal
        a = self.use(prem[0], ps[0], env)
        b = mp(mp(ax(AxiomId.MP_BOX, phi=f.left, psi=f.right), env[f]), a)
        return self.use(prem[1], ps[1], {**env, f.right: b})

    def _r_mp_dia(self, s, inst, env, prem, ps):
        f = inst.principal
        both = and_intro(self.use(prem[0], ps[0], env), self.use(prem[1], ps[1], env))
        return self.deliver(f, mp(ax(AxiomId.MP_DIA, phi=f.left, psi=f.right), both), s)

    # classical conditional rules

    def _refuted_diamonds(self, s, inst, env, dia_eqs, k: Callable[[list[Term]], Term]) -> Term:
        """Case on each selected succedent might-formula; in the branch where
        all fail, pass phi > ~chi_j for each to ``k``."""
        phi = inst.principal.left
        goal = disj(s.suc)
        pairs = list(zip(inst.diamonds, dia_eqs))

        def step(i: int, acc: list[Term]) -> Term:
            if i == len(pairs):
                return k(acc)
            d, eq = pairs[i]

            def fails(n: Term) -> Term:
                boxed_neg = _box_from_failed_diamond(n)
                moved = mp(ra_box(eq, phi, d.left, neg(d.right)), boxed_neg)
                return step(i + 1, acc + [moved])

            return cases(excluded_middle(d), goal, lambda y: self.deliver(d, y, s), fails)

        return step(0, [])

    def _r_ck_box(self, s, inst, env, prem, ps):
        f = inst.principal
        phi = f.left
        box_eqs, dia_eqs, (main,) = self._split_premises(inst, prem)
        boxed = self._boxed(phi, inst, env, box_eqs)
        main_seq = ps[-1]

        def finish(negs: list[Term]) -> Term:
            def body(e: Env) -> Term:
                t = self.use(main, main_seq, e)

                def k(g: Formula, u: Term) -> Term:
                    if g == f.right:
                        return u
                    return efq(mp(e[neg(g)], u), f.right)

                return split(t, main_seq.suc, f.right, k)

            return self.deliver(f, box_core(phi, boxed + negs, f.right, body), s)

        return self._refuted_diamonds(s, inst, env, dia_eqs, finish)

    def _r_ck_dia(self, s, inst, env, prem, ps):
        f = inst.principal
        phi = f.left
        box_eqs, dia_eqs, (main,) = self._split_premises(inst, prem)
        boxed = self._boxed(phi, inst, env, box_eqs)
        main_seq = ps[-1]
        goal = disj(s.suc)

        def finish(negs: list[Term]) -> Term:
            def body(e: Env) -> Term:
                def inner(y: Term) -> Term:
                    t = self.use(main, main_seq, {**e, f.right: y})
                    return split(t, main_seq.suc, BOT, lambda g, u: mp(e[neg(g)], u))

                return lam(f.right, inner)

            not_psi = box_core(phi, boxed + negs, neg(f.right), body)
            definition = ax(AxiomId.DEF_DIA, phi=phi, psi=f.right)
            return efq(mp(mp(fst(definition), env[f]), not_psi), goal)

        return self._refuted_diamonds(s, inst, env, dia_eqs, finish)


def _box_from_failed_diamond(n: Term) -> Term:
    """From ~(eta ?> chi), eta > ~chi, using the classical definition of might."""
    d = n.formula.left
    definition = ax(AxiomId.DEF_DIA, phi=d.left, psi=d.right)
    target = CondBox(d.left, neg(d.right))
    nn = lam(neg(target), lambda y: mp(n, mp(snd(definition), y)))
    return double_negation(nn)
