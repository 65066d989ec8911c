"""Executable elimination of index replacement and cut.

``reduce_cut`` removes one cut whose premise derivations contain only
smaller cuts.  Its result may contain ``rep``, ``m``, ``c`` and ``w`` nodes;
``normalize`` turns these into ordinary derivations, eliminating each
``rep`` with cuts on its rep-formula and inlining the structural rules.
``eliminate_cut`` repeats both steps on a topmost cut of highest rank until
no cut is left.
"""

from __future__ import annotations

from typing import Optional

from ..formula import And, CondBox, CondDiam, Formula, Imp, Or, weight
from .rules import (
    EQUIVALENCE_PREMISES,
    STRIPPED_PREMISES,
    NestedDerivation,
    node,
    premises_for,
)
from .search import _axiom
from .structural import (
    StructuralError,
    _data_path,
    contract,
    invert,
    medial,
    necessitate,
    realign,
    rebuild,
    replace_output,
    weaken,
)
from .structure import Bracket, NestedSequent, Path, map_path, top_level

_INPUT_RULES = ("and*", "or*", "imp*", "box*", "dia*")
_OUTPUT_RULES = ("and^", "or^1", "or^2", "imp^", "box^", "dia^")


class CutError(ValueError):
    pass


def _split(full: Path, bracket: Optional[int]) -> tuple[Path, Optional[int]]:
    return (full, None) if bracket is None else (full[:-1], full[-1])


def _moved(d: NestedDerivation, src: NestedSequent, dst: NestedSequent) -> tuple[Path, Optional[int]]:
    """d's rule position, read in ``src`` coordinates, carried over to ``dst``."""
    return _split(map_path(src, dst, _data_path(d)), d.bracket)


# ---------------------------------------------------------------- rep


def eliminate_rep(
    d1: NestedDerivation,
    d2: NestedDerivation,
    d3: NestedDerivation,
    path: Optional[Path] = None,
    k: Optional[int] = None,
) -> NestedDerivation:
    """Simulate ``rep`` with cuts on its rep-formula.

    ``d1`` and ``d2`` derive ``φ*, η^`` and ``η*, φ^``; ``d3`` derives
    ``Γ{[φ: Δ]}`` with the bracket at ``path``, position ``k``.  The result
    derives ``Γ{[η: Δ]}`` without rep.
    """
    phi, eta = _equivalence_pair(d1, d2)
    if path is None:
        path, k = _find_bracket(d3.conclusion, phi)
    if d3.conclusion.at(path).brackets[k].index != phi:
        raise CutError("the bracket is not indexed by the rep-formula")
    for d in (d1, d2, d3):
        if "rep" in d.rules_used:
            raise CutError("eliminate_rep expects derivations without rep")
    if phi == eta:
        return d3
    return _rep(d1, d2, d3, tuple(path), k, phi, eta)


def _equivalence_pair(d1: NestedDerivation, d2: NestedDerivation) -> tuple[Formula, Formula]:
    c1, c2 = d1.conclusion, d2.conclusion
    if c1.brackets or len(c1.inputs) != 1 or c1.output is None:
        raise CutError(f"{c1} is not of the form phi*, eta^")
    phi, eta = c1.inputs[0], c1.output
    if c2 != top_level(eta, phi):
        raise CutError(f"{c2} does not match {c1}")
    return phi, eta


def _find_bracket(g: NestedSequent, index: Formula) -> tuple[Path, int]:
    for path, comp in g.walk():
        for k, b in enumerate(comp.brackets):
            if b.index == index:
                return path, k
    raise CutError("no bracket with the rep-formula as index")


def _renamed(g: NestedSequent, path: Path, k: int, index: Formula) -> NestedSequent:
    comp = g.at(path)
    bs = list(comp.brackets)
    bs[k] = Bracket(index, bs[k].body)
    return g.replace_at(path, NestedSequent(comp.inputs, comp.output, bs))


def _bridge(e_left: NestedDerivation, e_right: NestedDerivation, d1, d2, a: Formula, phi, eta):
    """From ``a*, φ^`` / ``φ*, a^``, derivations of ``a*, η^`` / ``η*, a^`` by cuts on φ."""
    left = node(top_level(a, eta), "cut", [e_left, weaken(d1, (), NestedSequent((a,)))], (), phi)
    right = node(top_level(eta, a), "cut", [d2, weaken(e_right, (), NestedSequent((eta,)))], (), phi)
    return left, right


def _rep(d1, d2, d3, path, k, phi, eta) -> NestedDerivation:
    g = d3.conclusion
    target = _renamed(g, path, k, eta)
    if d3.rule in _STRUCTURAL or d3.rule == "rep":
        raise CutError(f"inline the {d3.rule} node first")
    exp = premises_for(g, d3.rule, d3.path, d3.principal, d3.bracket, d3.extra)
    on_target = d3.rule in ("box*", "dia^") and d3.path == path and d3.bracket == k
    subs = []
    for i, (e, child) in enumerate(zip(exp, d3.premises)):
        if i in EQUIVALENCE_PREMISES.get(d3.rule, ()):
            subs.append(child)
            continue
        q = map_path(e, child.conclusion, path + (k,))
        subs.append(_rep(d1, d2, child, q[:-1], q[-1], phi, eta))
    if on_target:
        a = d3.principal.left
        subs[0], subs[1] = _bridge(d3.premises[0], d3.premises[1], d1, d2, a, phi, eta)
    return rebuild(target, d3, subs)


# ---------------------------------------------------------------- cut


def _hole(d1: NestedDerivation, d2: NestedDerivation, xi: Formula) -> Path:
    """The component of d2's conclusion holding the cut formula."""
    for path, comp in d2.conclusion.walk():
        if xi in comp.inputs:
            g = d2.conclusion.update(path, lambda c: c.without_inputs([xi]))
            if g.is_nested and d1.conclusion == g.stripped().add(path, NestedSequent((), xi)):
                return path
    raise CutError("the two derivations are not premises of a cut on this formula")


def reduce_cut(
    d1: NestedDerivation, d2: NestedDerivation, xi: Formula, path: Optional[Path] = None
) -> NestedDerivation:
    """Replace ``cut(d1, d2)`` on ``xi`` by a derivation with smaller cuts only.

    ``d1`` derives ``Γ↓{xi^}`` and ``d2`` derives ``Γ{xi*}``; ``path`` locates
    the hole in d2's conclusion.  Both may only contain cuts of rank at
    most the weight of ``xi``.  The result derives ``Γ{}`` and may contain
    ``rep`` (on formulas lighter than ``xi``) and the structural rules
    ``m``, ``c`` and ``w``.
    """
    if path is None:
        path = _hole(d1, d2, xi)
    path = tuple(path)
    if xi not in d2.conclusion.at(path).inputs:
        raise CutError(f"{xi} is not an input at {path}")
    g = d2.conclusion.update(path, lambda c: c.without_inputs([xi]))
    e0 = g.stripped().add(path, NestedSequent((), xi))
    if d1.conclusion != e0:
        raise CutError(f"left premise {d1.conclusion} should be {e0}")
    limit = weight(xi)
    if d1.rank > limit or d2.rank > limit:
        raise CutError("premise derivations may only contain smaller cuts")
    for d in (d1, d2):
        if not d.rules_used <= _PLAIN:
            raise CutError("premise derivations may only use the calculus rules and cut")
    return _reduce(realign(d1, e0), d2, xi, path, g)


_PLAIN = frozenset(("init", "bot*", "and*", "and^", "or*", "or^1", "or^2",
                    "imp*", "imp^", "box*", "box^", "dia*", "dia^", "cut"))
_STRUCTURAL = ("w", "nec", "m", "c")


def _principal_left(d1: NestedDerivation, path: Path) -> bool:
    return d1.rule in _OUTPUT_RULES and d1.path == path


def _principal_right(d2: NestedDerivation, path: Path, xi: Formula) -> bool:
    return d2.rule in _INPUT_RULES and d2.path == path and d2.principal == xi


def _reduce(d1, d2, xi, path, g) -> NestedDerivation:
    """``d1`` is aligned with ``g.stripped() + xi^``, ``d2`` with ``g + xi*``."""
    leaf = _axiom(g)
    if leaf is not None:
        return leaf
    if d1.rule == "init":
        return contract(d2, path, xi)
    if d2.rule == "init":
        return realign(d1, g)
    if d2.rule == "bot*":
        q = g.output_path()
        return replace_output(d1, path, q, g.at(q).output)
    if not _principal_left(d1, path):
        return _commute_left(d1, d2, xi, path, g)
    if not _principal_right(d2, path, xi):
        return _commute_right(d1, d2, xi, path, g)
    return _principal(d1, d2, xi, path, g)


def _ih(d1, d2, xi, path, target: NestedSequent) -> NestedDerivation:
    """The induction hypothesis on premises of smaller total height."""
    e0 = target.stripped().add(path, NestedSequent((), xi))
    return _reduce(realign(d1, e0), realign(d2, target.add(path, NestedSequent((xi,)))), xi, path, target)


def _commute_left(d1, d2, xi, path, g) -> NestedDerivation:
    """The last rule of d1 acts away from the cut formula; it is an input rule or a cut."""
    e0 = d1.conclusion
    exp1 = premises_for(e0, d1.rule, d1.path, d1.principal, d1.bracket, d1.extra)
    target = premises_for(g, d1.rule, d1.path, d1.principal, d1.bracket, d1.extra)
    subs = []
    for i, (e, t, child) in enumerate(zip(exp1, target, d1.premises)):
        if i in EQUIVALENCE_PREMISES.get(d1.rule, ()) or i in STRIPPED_PREMISES.get(d1.rule, ()):
            subs.append(child)
            continue
        if d1.rule == "cut":
            right = weaken(d2, d1.path, NestedSequent((d1.principal,)))
        else:
            right = invert(d2, d1.rule, d1.path, d1.principal, i, d1.bracket)
        subs.append(_ih(realign(child, e), right, xi, path, t))
    return rebuild(g, d1, subs)


def _commute_right(d1, d2, xi, path, g) -> NestedDerivation:
    """The last rule of d2 does not act on the cut formula."""
    c2 = d2.conclusion
    exp2 = premises_for(c2, d2.rule, d2.path, d2.principal, d2.bracket, d2.extra)
    target = premises_for(g, d2.rule, d2.path, d2.principal, d2.bracket, d2.extra)
    subs = []
    for i, (e, t, child) in enumerate(zip(exp2, target, d2.premises)):
        if i in EQUIVALENCE_PREMISES.get(d2.rule, ()):
            subs.append(child)
            continue
        subs.append(_ih(_left_for(d1, d2, i), realign(child, e), xi, path, t))
    return rebuild(g, d2, subs)


def _left_for(d1: NestedDerivation, d2: NestedDerivation, i: int) -> NestedDerivation:
    """d1 adjusted to the i-th premise of d2's last rule."""
    rule, f = d2.rule, d2.principal
    if i in STRIPPED_PREMISES.get(rule, ()) or rule in ("and^", "or^1", "or^2", "dia^"):
        return d1
    if rule == "cut":
        return weaken(d1, d2.path, NestedSequent((f,)))
    if rule == "imp^":
        return weaken(d1, d2.path, NestedSequent((f.left,)))
    if rule == "box^":
        return weaken(d1, d2.path, NestedSequent(brackets=(Bracket(f.left),)))
    return invert(d1, rule, d2.path, f, i, d2.bracket)


def _principal(d1, d2, xi, path, g) -> NestedDerivation:
    e0 = d1.conclusion
    p1 = premises_for(e0, d1.rule, d1.path, d1.principal, d1.bracket)
    k1 = [realign(c, e) for c, e in zip(d1.premises, p1)]
    p2 = premises_for(d2.conclusion, d2.rule, d2.path, d2.principal, d2.bracket)
    k2 = [realign(c, e) for c, e in zip(d2.premises, p2)]

    def cut(conclusion, left, right, at, f):
        return node(conclusion, "cut", [left, right], at, f)

    if isinstance(xi, And):
        a, b = xi.left, xi.right
        with_a = g.add(path, NestedSequent((a,)))
        inner = cut(with_a, weaken(k1[1], path, NestedSequent((a,))), k2[0], path, b)
        return cut(g, k1[0], inner, path, a)
    if isinstance(xi, Or):
        i = 0 if d1.rule == "or^1" else 1
        return cut(g, k1[0], k2[i], path, (xi.left, xi.right)[i])
    if isinstance(xi, Imp):
        a, b = xi.left, xi.right
        # k2[0] is Γ↓{a^} with xi* still present; cut it against d1 first.
        left_a = _ih(d1, k2[0], xi, path, p2[0].update(path, lambda c: c.without_inputs([xi])))
        g_b = g.stripped().add(path, NestedSequent((), b))
        to_b = cut(g_b, left_a, k1[0], path, a)
        return cut(g, to_b, k2[1], path, b)
    if isinstance(xi, CondBox):
        return _principal_box(d1, d2, k1, k2, xi, path, g)
    if isinstance(xi, CondDiam):
        return _principal_dia(d1, d2, k1, k2, xi, path, g)
    raise CutError(f"no principal reduction for {xi}")  # pragma: no cover


def _principal_box(d1, d2, k1, k2, xi, path, g) -> NestedDerivation:
    phi, psi = xi.left, xi.right
    k = d2.bracket
    comp = g.at(path)
    eta, delta = comp.brackets[k].index, comp.brackets[k].body
    low = delta.stripped()
    doubled = g.add(path, NestedSequent(brackets=(Bracket(eta, low),)))
    # Left: rename the fresh [phi: psi^] of d1's premise and weaken it by Δ.
    fresh = len(k1[0].conclusion.at(path).brackets) - 1
    widened = weaken(k1[0], path + (fresh,), low)
    renamed = _renamed(widened.conclusion, path, fresh, eta)
    left = node(renamed, "rep", [k2[0], k2[1], widened], path, phi, fresh)
    # Right: the induction hypothesis on d1 (weakened by psi*) and Q.
    q_target = g.update(path + (k,), lambda c: c.plus(NestedSequent((psi,))))
    y = _ih(weaken(d1, path + (k,), NestedSequent((psi,))), k2[2], xi, path, q_target)
    with_psi = doubled.update(path + (k,), lambda c: c.plus(NestedSequent((psi,))))
    right = node(with_psi, "w", [y], path, extra=NestedSequent(brackets=(Bracket(eta, low),)))
    top = node(doubled, "cut", [left, right], path + (k,), psi)
    return _squash(top, path, NestedSequent(brackets=(Bracket(eta, low),)))


def _principal_dia(d1, d2, k1, k2, xi, path, g) -> NestedDerivation:
    phi, psi = xi.left, xi.right
    k = d1.bracket
    eta = g.at(path).brackets[k].index
    fresh = len(k2[0].conclusion.at(path).brackets) - 1
    renamed = _renamed(k2[0].conclusion, path, fresh, eta)
    rep = node(renamed, "rep", [k1[0], k1[1], k2[0]], path, phi, fresh)
    merged_target = g.update(path + (k,), lambda c: c.plus(NestedSequent((psi,))))
    merged = node(merged_target, "m", [rep], path, bracket=k, extra=NestedSequent((psi,)))
    return node(g, "cut", [k1[2], merged], path + (k,), psi)


def _squash(d: NestedDerivation, path: Path, copy: NestedSequent) -> NestedDerivation:
    """Remove one copy of the input sequent ``copy`` at ``path`` with explicit c and m nodes."""
    for f in copy.inputs:
        g = d.conclusion.update(path, lambda c: c.without_inputs([f]))
        d = node(g, "c", [d], path, f)
    for b in copy.brackets:
        comp = d.conclusion.at(path)
        i2 = max(j for j, x in enumerate(comp.brackets) if x == b)
        i1 = next(
            j for j, x in enumerate(comp.brackets)
            if j != i2 and x.index == b.index and x.body.stripped() == b.body
        )
        bs = list(comp.brackets)
        bs[i1] = Bracket(b.index, bs[i1].body.plus(b.body))
        del bs[i2]
        g = d.conclusion.replace_at(path, NestedSequent(comp.inputs, comp.output, bs))
        i1 -= i1 > i2
        d = node(g, "m", [d], path, bracket=i1, extra=b.body)
        d = _squash(d, path + (i1,), b.body)
    return d


# ---------------------------------------------------------------- driver


def normalize(d: NestedDerivation) -> NestedDerivation:
    """Eliminate rep and inline w, nec, m and c, working upwards from the leaves."""
    memo: dict[int, NestedDerivation] = {}

    def go(n: NestedDerivation) -> NestedDerivation:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        subs = [go(p) for p in n.premises]
        g = n.conclusion
        if n.rule in ("rep", "w", "m", "c"):
            exp = premises_for(g, n.rule, n.path, n.principal, n.bracket, n.extra)
            main = realign(subs[-1], exp[-1])
        if n.rule == "rep":
            out = eliminate_rep(subs[0], subs[1], main, n.path, n.bracket)
        elif n.rule == "w":
            out = weaken(main, n.path, n.extra)
        elif n.rule == "m":
            last = len(exp[0].at(n.path).brackets) - 1
            out = medial(main, n.path, n.bracket, last)
        elif n.rule == "c":
            out = contract(main, n.path, n.principal)
        elif n.rule == "nec":
            out = necessitate(subs[0], g.brackets[0].index)
        else:
            out = n if all(a is b for a, b in zip(subs, n.premises)) else n.with_premises(subs)
        out = realign(out, g)
        memo[id(n)] = out
        return out

    return go(d)


def _topmost_max_cut(d: NestedDerivation, rank: int) -> tuple[int, ...]:
    """Premise-index path to a cut of ``rank`` with no such cut above it."""
    where: tuple[int, ...] = ()
    n = d
    while True:
        for i, p in enumerate(n.premises):
            if p.rank == rank:
                where += (i,)
                n = p
                break
        else:
            return where


def _replace(d: NestedDerivation, where: tuple[int, ...], new: NestedDerivation) -> NestedDerivation:
    if not where:
        return new
    subs = list(d.premises)
    subs[where[0]] = _replace(subs[where[0]], where[1:], new)
    return d.with_premises(subs)


def eliminate_cut(d: NestedDerivation, trace: Optional[list] = None) -> NestedDerivation:
    """A cut-free derivation of the same conclusion.

    ``trace``, if given, receives the rank of the derivation before every
    reduction step and finally 0.
    """
    d = normalize(d)
    while True:
        r = d.rank
        if trace is not None:
            trace.append(r)
        if r == 0:
            return d
        where = _topmost_max_cut(d, r)
        n = d
        for i in where:
            n = n.premises[i]
        exp = premises_for(n.conclusion, "cut", n.path, n.principal)
        left, right = (realign(p, e) for p, e in zip(n.premises, exp))
        reduced = normalize(reduce_cut(left, right, n.principal, n.path))
        d = _replace(d, where, realign(reduced, n.conclusion))


def cut_on(d1: NestedDerivation, d2: NestedDerivation, xi: Formula, path: Optional[Path] = None) -> NestedDerivation:
    """The cut node joining two premise derivations."""
    if path is None:
        path = _hole(d1, d2, xi)
    g = d2.conclusion.update(tuple(path), lambda c: c.without_inputs([xi]))
    n = node(g, "cut", [d1, d2], path, xi)
    try:
        rebuild(g, n, n.premises)
    except StructuralError as e:
        raise CutError(str(e)) from None
    return n
