"""Admissible structural rules as derivation transformers.

Every transformer returns a derivation whose root is stored in the same
order as the edited conclusion, so paths computed on the input's
conclusion stay meaningful for the result.  Inner nodes are only equal up
to reordering, which is all the checker needs.

Weakening, inversion and necessitation rebuild the derivation node for
node and never increase height or rank.  Medial and contraction do the
same except where contraction meets its own formula as principal, where
it inverts the premise and recurses on smaller formulas.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional

from ..formula import BOT, And, Atom, CondBox, CondDiam, Formula, Imp, Or
from .rules import (
    EQUIVALENCE_PREMISES,
    STRIPPED_PREMISES,
    NestedDerivation,
    RuleError,
    node,
    premises_for,
)
from .structure import (
    EMPTY,
    Bracket,
    MalformedNested,
    NestedContext,
    NestedSequent,
    Path,
    map_path,
    top_level,
)

_STRUCTURAL_NODES = ("w", "nec", "m", "c")


class StructuralError(ValueError):
    pass


class Edit(NamedTuple):
    path: Path
    remove: tuple = ()
    drop_output: bool = False
    add: NestedSequent = EMPTY


def apply_edits(g: NestedSequent, edits) -> NestedSequent:
    for e in edits:
        comp = g.at(e.path).without_inputs(e.remove)
        if e.drop_output:
            if comp.output is None:
                raise MalformedNested("no output formula to remove")
            comp = comp.with_output(None)
        g = g.replace_at(e.path, comp.plus(e.add))
    return g


def _map_edits(edits, src: NestedSequent, dst: NestedSequent, stripped: bool):
    out = []
    for e in edits:
        path = map_path(src, dst, e.path)
        if stripped:
            out.append(Edit(path, e.remove, False, e.add.stripped()))
        else:
            out.append(e._replace(path=path))
    return out


def _data_path(d: NestedDerivation) -> Path:
    return d.path if d.bracket is None else d.path + (d.bracket,)


def realign(d: NestedDerivation, target: NestedSequent) -> NestedDerivation:
    """``d`` with its root relabelled by the equal sequent ``target``."""
    if d.conclusion != target:
        raise StructuralError(f"{d.conclusion} is not {target}")
    if d.conclusion.items_text() == target.items_text() and _same_layout(d.conclusion, target):
        return d
    full = map_path(d.conclusion, target, _data_path(d))
    path, k = (full, None) if d.bracket is None else (full[:-1], full[-1])
    return NestedDerivation(target, d.rule, d.premises, path, d.principal, k, d.extra)


def _same_layout(a: NestedSequent, b: NestedSequent) -> bool:
    return a.inputs == b.inputs and a.output == b.output and all(
        x.index == y.index and _same_layout(x.body, y.body) for x, y in zip(a.brackets, b.brackets)
    )


def rebuild(conclusion, d: NestedDerivation, subs, path=None, bracket=None) -> NestedDerivation:
    """A node with ``d``'s rule on a new conclusion, checked on the spot."""
    path = d.path if path is None else path
    bracket = d.bracket if bracket is None else bracket
    n = node(conclusion, d.rule, subs, path, d.principal, bracket, d.extra)
    _verify(n)
    return n


def _verify(n: NestedDerivation) -> None:
    try:
        exp = premises_for(n.conclusion, n.rule, n.path, n.principal, n.bracket, n.extra)
    except (RuleError, MalformedNested) as e:
        raise StructuralError(f"{n.rule} does not apply to {n.conclusion}: {e}") from None
    got = tuple(p.conclusion for p in n.premises)
    if exp != got:
        raise StructuralError(f"{n.rule} on {n.conclusion}: premises do not match")


Hook = Callable[[NestedDerivation, list], Optional[NestedDerivation]]


def _transform(d: NestedDerivation, edits, hook: Optional[Hook] = None) -> NestedDerivation:
    if d.rule in _STRUCTURAL_NODES:
        raise StructuralError(f"inline the {d.rule} node first")
    if hook is not None:
        r = hook(d, edits)
        if r is not None:
            return realign(r, apply_edits(d.conclusion, edits))
    g2 = apply_edits(d.conclusion, edits)
    exp = premises_for(d.conclusion, d.rule, d.path, d.principal, d.bracket, d.extra)
    subs = []
    for i, (e, child) in enumerate(zip(exp, d.premises)):
        if i in EQUIVALENCE_PREMISES.get(d.rule, ()):
            subs.append(child)
            continue
        stripped = i in STRIPPED_PREMISES.get(d.rule, ())
        subs.append(_transform(child, _map_edits(edits, e, child.conclusion, stripped), hook))
    return rebuild(g2, d, subs)


# ---------------------------------------------------------------- rules


def weaken(d: NestedDerivation, path: Path, extra: NestedSequent) -> NestedDerivation:
    """Add the input sequent ``extra`` to the component at ``path``."""
    if not extra.is_input:
        raise StructuralError("only input sequents can be weakened in")
    if extra.is_empty:
        return d
    return _transform(d, [Edit(tuple(path), add=extra)])


def necessitate(d: NestedDerivation, index: Formula) -> NestedDerivation:
    """From a derivation of Γ, one of ``[index: Γ]`` of the same height."""
    memo: dict[int, NestedDerivation] = {}

    def wrap(n: NestedDerivation) -> NestedDerivation:
        if id(n) in memo:
            return memo[id(n)]
        if n.rule in _STRUCTURAL_NODES:
            raise StructuralError(f"inline the {n.rule} node first")
        eq = EQUIVALENCE_PREMISES.get(n.rule, ())
        subs = [p if i in eq else wrap(p) for i, p in enumerate(n.premises)]
        out = NestedDerivation(
            NestedSequent(brackets=(Bracket(index, n.conclusion),)),
            n.rule, tuple(subs), (0,) + n.path, n.principal, n.bracket, n.extra,
        )
        memo[id(n)] = out
        return out

    return wrap(d)


_INVERT_EDIT = {
    "and*": lambda f, i: (True, False, NestedSequent((f.left, f.right))),
    "or*": lambda f, i: (True, False, NestedSequent((f.right if i else f.left,))),
    "imp*": lambda f, i: (True, False, NestedSequent((f.right,))),
    "dia*": lambda f, i: (True, False, NestedSequent(brackets=(Bracket(f.left, NestedSequent((f.right,))),))),
    "and^": lambda f, i: (False, True, NestedSequent((), f.right if i else f.left)),
    "imp^": lambda f, i: (False, True, NestedSequent((f.left,), f.right)),
    "box^": lambda f, i: (False, True, NestedSequent(brackets=(Bracket(f.left, NestedSequent((), f.right)),))),
}
_INVERT_TYPES = {"and*": And, "or*": Or, "imp*": Imp, "dia*": CondDiam, "and^": And, "imp^": Imp, "box^": CondBox}
_BRANCHING = ("and^", "or*")


def invert(
    d: NestedDerivation,
    rule: str,
    path: Path,
    formula: Formula,
    premise: int = 0,
    bracket: Optional[int] = None,
) -> NestedDerivation:
    """A derivation of premise ``premise`` of ``rule`` applied to d's conclusion.

    For ``imp*`` only the right premise (1) is invertible; for ``box*`` only
    the main premise (2), which is a weakening.
    """
    path = tuple(path)
    if rule == "box*":
        if premise != 2 or bracket is None or not isinstance(formula, CondBox):
            raise StructuralError("box* inverts to its main premise, given a bracket")
        premises_for(d.conclusion, rule, path, formula, bracket)
        return weaken(d, path + (bracket,), NestedSequent((formula.right,)))
    if rule not in _INVERT_EDIT:
        raise StructuralError(f"{rule} is not invertible")
    if rule == "imp*" and premise != 1:
        raise StructuralError("only the right premise of imp* is invertible")
    if rule not in _BRANCHING and rule != "imp*" and premise != 0:
        raise StructuralError(f"{rule} has a single premise")
    if not isinstance(formula, _INVERT_TYPES[rule]):
        raise StructuralError(f"{rule} does not match {formula}")
    try:
        premises_for(d.conclusion, rule, path, formula, bracket)
    except RuleError as e:
        raise StructuralError(str(e)) from None
    is_input, drop, add = _INVERT_EDIT[rule](formula, premise)
    edit = Edit(path, (formula,) if is_input else (), drop, add)
    take = premise if rule in _BRANCHING else (1 if rule == "imp*" else 0)

    def hook(n: NestedDerivation, edits) -> Optional[NestedDerivation]:
        if n.rule == rule and n.path == edits[0].path and n.principal == formula:
            return n.premises[take]
        return None

    return _transform(d, [edit], hook)


def replace_output(d: NestedDerivation, old: Path, new: Path, output: Formula) -> NestedDerivation:
    """Swap a passive output formula at ``old`` for ``output`` at ``new``.

    The removed output must never be principal, as for ``false``.
    """
    return _transform(d, [Edit(tuple(old), drop_output=True), Edit(tuple(new), add=NestedSequent((), output))])


def _no_rep(d: NestedDerivation, what: str) -> None:
    if "rep" in d.rules_used:
        raise StructuralError(f"{what} needs a derivation without rep")


def medial(d: NestedDerivation, path: Path, k1: int, k2: int) -> NestedDerivation:
    """Merge bracket ``k2`` into bracket ``k1``; both sit at ``path`` with equal index."""
    _no_rep(d, "medial")
    return _medial(d, tuple(path), k1, k2)


def _medial(d: NestedDerivation, path: Path, k1: int, k2: int) -> NestedDerivation:
    if d.rule in _STRUCTURAL_NODES:
        raise StructuralError(f"inline the {d.rule} node first")
    g = d.conclusion
    comp = g.at(path)
    b1, b2 = comp.brackets[k1], comp.brackets[k2]
    if k1 == k2 or b1.index != b2.index:
        raise StructuralError("medial needs two distinct brackets with the same index")
    shift = len(b1.body.brackets)
    merged = list(comp.brackets)
    merged[k1] = Bracket(b1.index, b1.body.plus(b2.body))
    del merged[k2]
    g2 = g.replace_at(path, NestedSequent(comp.inputs, comp.output, merged))
    n = len(path)
    k1n = k1 - (k1 > k2)

    def remap(p: Path) -> Path:
        if len(p) <= n or p[:n] != path:
            return p
        j, rest = p[n], p[n + 1:]
        if j == k2:
            return path + (k1n,) + ((rest[0] + shift,) + rest[1:] if rest else ())
        return path + (j - (j > k2),) + rest

    full = remap(_data_path(d))
    new_path, new_k = (full, None) if d.bracket is None else (full[:-1], full[-1])
    exp = premises_for(g, d.rule, d.path, d.principal, d.bracket, d.extra)
    subs = []
    for i, (e, child) in enumerate(zip(exp, d.premises)):
        if i in EQUIVALENCE_PREMISES.get(d.rule, ()):
            subs.append(child)
            continue
        q1 = map_path(e, child.conclusion, path + (k1,))
        q2 = map_path(e, child.conclusion, path + (k2,))
        subs.append(_medial(child, q1[:-1], q1[-1], q2[-1]))
    return rebuild(g2, d, subs, new_path, new_k)


def contract(d: NestedDerivation, path: Path, formula: Formula) -> NestedDerivation:
    """Remove one of two copies of the input ``formula`` at ``path``."""
    _no_rep(d, "contraction")
    path = tuple(path)
    if list(d.conclusion.at(path).inputs).count(formula) < 2:
        raise StructuralError(f"{formula} does not occur twice at {path}")
    return _transform(d, [Edit(path, (formula,))], _contract_principal)


def _contract_principal(n: NestedDerivation, edits) -> Optional[NestedDerivation]:
    path, (f,) = edits[0].path, edits[0].remove
    if n.path != path or n.principal != f or n.rule not in ("and*", "or*", "imp*", "box*", "dia*"):
        return None
    g2 = apply_edits(n.conclusion, edits)
    exp = premises_for(n.conclusion, n.rule, n.path, f, n.bracket)
    kids = [realign(c, e) for c, e in zip(n.premises, exp)]
    if n.rule == "and*":
        d = invert(kids[0], "and*", path, f)
        subs = [contract(contract(d, path, f.left), path, f.right)]
    elif n.rule == "or*":
        subs = [contract(invert(kids[i], "or*", path, f, i), path, part) for i, part in enumerate((f.left, f.right))]
    elif n.rule == "imp*":
        right = invert(kids[1], "imp*", path, f, 1)
        subs = [contract(kids[0], path, f), contract(right, path, f.right)]
    elif n.rule == "box*":
        subs = [kids[0], kids[1], contract(kids[2], path, f)]
    else:
        d = invert(kids[0], "dia*", path, f)
        comp = d.conclusion.at(path)
        k1, k2 = len(comp.brackets) - 2, len(comp.brackets) - 1
        d = medial(d, path, k1, k2)
        subs = [contract(d, path + (k1,), f.right)]
    return rebuild(g2, n, subs)


# ---------------------------------------------------------------- identity


def generalized_init(context: NestedContext, f: Formula) -> NestedDerivation:
    """A cut-free derivation of ``context{f*, f^}`` by recursion on ``f``."""
    if context.base.count_outputs():
        raise MalformedNested("filling this context with an output formula gives two outputs")
    goal = context.fill(NestedSequent((f,), f))
    return _identity(goal, context.path, f, {})


def _identity(g: NestedSequent, path: Path, f: Formula, eq: dict) -> NestedDerivation:
    if isinstance(f, Atom):
        return node(g, "init", (), path, f)
    if f == BOT:
        return node(g, "bot*", (), path, f)

    def step(goal, rule, k=None):
        return premises_for(goal, rule, path, f, k)

    def equiv(a: Formula) -> NestedDerivation:
        if a not in eq:
            eq[a] = _identity(top_level(a, a), (), a, eq)
        return eq[a]

    if isinstance(f, And):
        subs = []
        for part, goal in zip((f.left, f.right), step(g, "and^")):
            (inner,) = step(goal, "and*")
            subs.append(node(goal, "and*", [_identity(inner, path, part, eq)], path, f))
        return node(g, "and^", subs, path, f)
    if isinstance(f, Or):
        subs = []
        for part, rule, goal in zip((f.left, f.right), ("or^1", "or^2"), step(g, "or*")):
            (inner,) = step(goal, rule)
            subs.append(node(goal, rule, [_identity(inner, path, part, eq)], path, f))
        return node(g, "or*", subs, path, f)
    if isinstance(f, Imp):
        (mid,) = step(g, "imp^")
        left, right = step(mid, "imp*")
        inner = node(mid, "imp*", [_identity(left, path, f.left, eq), _identity(right, path, f.right, eq)], path, f)
        return node(g, "imp^", [inner], path, f)
    if isinstance(f, CondBox):
        (mid,) = step(g, "box^")
        k = len(mid.at(path).brackets) - 1
        _, _, main = step(mid, "box*", k)
        e = equiv(f.left)
        inner = node(mid, "box*", [e, e, _identity(main, path + (k,), f.right, eq)], path, f, k)
        return node(g, "box^", [inner], path, f)
    if isinstance(f, CondDiam):
        (mid,) = step(g, "dia*")
        k = len(mid.at(path).brackets) - 1
        _, _, main = premises_for(mid, "dia^", path, f, k)
        e = equiv(f.left)
        inner = node(mid, "dia^", [e, e, _identity(main, path + (k,), f.right, eq)], path, f, k)
        return node(g, "dia*", [inner], path, f)
    raise StructuralError(f"not a formula of the conditional language: {f!r}")


# ---------------------------------------------------------------- dispatch


def apply_structural(kind: str, d: NestedDerivation, **target) -> NestedDerivation:
    """Dispatch by name: ``w``, ``nec``, ``m``, ``c`` or ``invert``.

    ``w`` takes ``path`` and ``extra``; ``nec`` takes ``index``; ``m`` takes
    ``path``, ``k1`` and ``k2``; ``c`` takes ``path`` and ``formula``;
    ``invert`` takes ``rule``, ``path``, ``formula`` and optionally
    ``premise`` and ``bracket``.
    """
    try:
        if kind == "w":
            return weaken(d, target["path"], target["extra"])
        if kind == "nec":
            return necessitate(d, target["index"])
        if kind == "m":
            return medial(d, target["path"], target["k1"], target["k2"])
        if kind == "c":
            return contract(d, target["path"], target["formula"])
        if kind == "invert":
            return invert(
                d, target["rule"], target["path"], target["formula"],
                target.get("premise", 0), target.get("bracket"),
            )
    except (MalformedNested, IndexError, KeyError) as e:
        raise StructuralError(f"target does not match the derivation: {e}") from None
    raise StructuralError(f"unknown structural operation {kind!r}")
