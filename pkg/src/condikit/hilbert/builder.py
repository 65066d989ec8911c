"""Proof terms with dischargeable assumptions, compiled to Hilbert lines.

A term proves one formula from axioms, given hypotheses and local
assumptions.  ``lam`` discharges an assumption with the deduction theorem
(K and S), so lemma code reads like natural deduction.  Rule applications
other than modus ponens must not depend on local assumptions, which is
checked when they are built.
"""

from __future__ import annotations

import itertools
from typing import Callable, Optional

from ..formula import BOT, Formula, Imp, conj, disj
from .proof import Axiom, HilbertProof, Hypothesis, Line, Rule
from .schemas import AxiomId, axiom_instance, rule_conclusion_ok

_ids = itertools.count()
_EMPTY: frozenset = frozenset()


class Term:
    __slots__ = ("formula", "kind", "data", "args", "free")

    def __init__(self, formula: Formula, kind: str, data=None, args: tuple = (), free=_EMPTY):
        self.formula = formula
        self.kind = kind  # "ax", "given", "hyp", "mp", "rule"
        self.data = data
        self.args = args
        self.free = free

    def __repr__(self) -> str:
        return f"Term({self.kind}: {self.formula})"


class ProofError(ValueError):
    pass


def ax(a: AxiomId, **kw: Formula) -> Term:
    return Term(axiom_instance(a, **kw), "ax", a)


def given(f: Formula) -> Term:
    return Term(f, "given")


def assume(f: Formula) -> Term:
    i = next(_ids)
    return Term(f, "hyp", i, free=frozenset({i}))


def mp(imp: Term, a: Term) -> Term:
    f = imp.formula
    if not isinstance(f, Imp) or f.left != a.formula:
        raise ProofError(f"cannot apply {f} to {a.formula}")
    return Term(f.right, "mp", None, (imp, a), imp.free | a.free)


def rule(name: str, premises: list[Term], conclusion: Formula) -> Term:
    if any(p.free for p in premises):
        raise ProofError(f"{name} applied under a local assumption")
    if not rule_conclusion_ok(name, [p.formula for p in premises], conclusion):
        raise ProofError(f"{name} does not yield {conclusion}")
    return Term(conclusion, "rule", name, tuple(premises))


_identity_cache: dict[Formula, Term] = {}


def identity(a: Formula) -> Term:
    """A -> A from S, K, K."""
    t = _identity_cache.get(a)
    if t is None:
        aa = Imp(a, a)
        s = ax(AxiomId.S, phi=a, psi=aa, chi=a)
        t = mp(mp(s, ax(AxiomId.K, phi=a, psi=aa)), ax(AxiomId.K, phi=a, psi=a))
        _identity_cache[a] = t
    return t


def discharge(h: Term, t: Term) -> Term:
    """From a proof of B under assumption h, a proof of h -> B."""
    hid = h.data
    memo: dict[int, Term] = {}

    def go(u: Term) -> Term:
        key = id(u)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if hid not in u.free:
            r = mp(ax(AxiomId.K, phi=u.formula, psi=h.formula), u)
        elif u.kind == "hyp":
            r = identity(h.formula)
        else:
            imp, a = u.args
            if a.kind == "hyp" and a.data == hid and hid not in imp.free:
                r = imp
            else:
                b = imp.formula.right
                s = ax(AxiomId.S, phi=h.formula, psi=a.formula, chi=b)
                r = mp(mp(s, go(imp)), go(a))
        memo[key] = r
        return r

    return go(t)


def lam(f: Formula, body: Callable[[Term], Term]) -> Term:
    h = assume(f)
    return discharge(h, body(h))


def linearize(t: Term) -> HilbertProof:
    """Lines for ``t`` in dependency order, one line per distinct formula."""
    if t.free:
        raise ProofError("proof still depends on a local assumption")
    index: dict[Formula, int] = {}
    lines: list[Line] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        u, ready = stack.pop()
        if u.formula in index:
            continue
        if not ready:
            stack.append((u, True))
            for a in reversed(u.args):
                if a.formula not in index:
                    stack.append((a, False))
            continue
        if u.kind == "ax":
            just = Axiom(u.data)
        elif u.kind == "given":
            just = Hypothesis()
        elif u.kind == "mp":
            imp, a = u.args
            just = Rule("MP", (index[a.formula], index[imp.formula]))
        elif u.kind == "rule":
            just = Rule(u.data, tuple(index[a.formula] for a in u.args))
        else:
            raise ProofError("unexpected local assumption")
        index[u.formula] = len(lines)
        lines.append(Line(u.formula, just))
    # The conclusion may have been proved early as a subterm; keep only what it needs.
    return HilbertProof(tuple(_prune(lines, index[t.formula])))


def _prune(lines: list[Line], root: int) -> list[Line]:
    """The lines ``root`` depends on, renumbered, with ``root`` last."""
    live = {root}
    for i in range(root, -1, -1):
        j = lines[i].just
        if i in live and isinstance(j, Rule):
            live.update(j.premises)
    renum: dict[int, int] = {}
    out: list[Line] = []
    for i in sorted(live):
        j = lines[i].just
        if isinstance(j, Rule):
            j = Rule(j.name, tuple(renum[p] for p in j.premises))
        renum[i] = len(out)
        out.append(Line(lines[i].formula, j))
    return out


# ------------------------------------------------------------ IPL toolkit


def and_intro(a: Term, b: Term) -> Term:
    return mp(mp(ax(AxiomId.AND_I, phi=a.formula, psi=b.formula), a), b)


def fst(t: Term) -> Term:
    f = t.formula
    return mp(ax(AxiomId.AND_E1, phi=f.left, psi=f.right), t)


def snd(t: Term) -> Term:
    f = t.formula
    return mp(ax(AxiomId.AND_E2, phi=f.left, psi=f.right), t)


def inl(t: Term, right: Formula) -> Term:
    return mp(ax(AxiomId.OR_I1, phi=t.formula, psi=right), t)


def inr(left: Formula, t: Term) -> Term:
    return mp(ax(AxiomId.OR_I2, phi=left, psi=t.formula), t)


def efq(t: Term, goal: Formula) -> Term:
    if t.formula != BOT:
        raise ProofError("ex falso needs a proof of false")
    if goal == BOT:
        return t
    return mp(ax(AxiomId.EFQ, phi=goal), t)


def cases(t: Term, goal: Formula, left: Callable[[Term], Term], right: Callable[[Term], Term]) -> Term:
    a, b = t.formula.left, t.formula.right
    f = lam(a, left)
    g = lam(b, right)
    return mp(mp(mp(ax(AxiomId.OR_E, phi=a, psi=b, chi=goal), f), g), t)


def compose(f: Term, g: Term) -> Term:
    """From A -> B and B -> C, A -> C."""
    return lam(f.formula.left, lambda x: mp(g, mp(f, x)))


def excluded_middle(f: Formula) -> Term:
    return ax(AxiomId.EM, phi=f)


def double_negation(t: Term) -> Term:
    """From ~~A, A (classical)."""
    a = t.formula.left.left
    return cases(excluded_middle(a), a, lambda x: x, lambda n: efq(mp(t, n), a))


# ------------------------------------------------------------ contexts

Env = dict


def unpack(t: Term, items: list[Formula], env: Optional[Env] = None) -> Env:
    """Split a proof of the left-folded conjunction of ``items``."""
    env = {} if env is None else env
    items = list(items)
    while len(items) > 1:
        env.setdefault(items[-1], snd(t))
        t = fst(t)
        items.pop()
    if items:
        env.setdefault(items[0], t)
    return env


def pack(env: Env, items) -> Term:
    items = list(items)
    if not items:
        return identity(BOT)
    acc = env[items[0]]
    for f in items[1:]:
        acc = and_intro(acc, env[f])
    return acc


def inject(t: Term, items, index: int) -> Term:
    """Proof of the left-folded disjunction of ``items`` from its ``index``-th member."""
    items = list(items)
    acc = t if index == 0 else inr(disj(items[:index]), t)
    for f in items[index + 1:]:
        acc = inl(acc, f)
    return acc


def split(t: Term, items, goal: Formula, k: Callable[[Formula, Term], Term]) -> Term:
    """Case analysis on the left-folded disjunction of ``items``."""
    items = list(items)
    if not items:
        return efq(t, goal)
    if len(items) == 1:
        return k(items[0], t)
    return cases(
        t,
        goal,
        lambda x: split(x, items[:-1], goal, k),
        lambda y: k(items[-1], y),
    )


def conj_lam(items, body: Callable[[Env], Term]) -> Term:
    """Proof of conj(items) -> B from a body using the members."""
    items = list(items)
    return lam(conj(items), lambda x: body(unpack(x, items)))


def iff_intro(ab: Term, ba: Term) -> Term:
    return and_intro(ab, ba)

