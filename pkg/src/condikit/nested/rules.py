"""Rules of the nested calculus, derivation trees and their checker.

Rule names use the printed polarity marks: ``and*`` acts on an input
conjunction, ``and^`` on an output one.  Every node records the path of the
component it acts on, its principal formula and, for rules that look at a
sibling bracket, that bracket's position.  The checker recomputes the
premises from this data and compares them with the children's conclusions
as multisets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional

from ..formula import BOT, And, Atom, CondBox, CondDiam, Formula, Imp, Or, parse, to_latex, to_text, weight
from .structure import (
    Bracket,
    MalformedNested,
    NestedSequent,
    Path,
    parse_nested,
    top_level,
)

LOGICAL_RULES = (
    "init", "bot*", "and*", "and^", "or*", "or^1", "or^2",
    "imp*", "imp^", "box*", "box^", "dia*", "dia^",
)
STRUCTURAL_RULES = ("w", "nec", "m", "c", "cut", "rep")

# Premises that are top-level equivalence sequents rather than the context.
EQUIVALENCE_PREMISES = {"box*": (0, 1), "dia^": (0, 1), "rep": (0, 1)}
# Premises whose context has lost the conclusion's output formula.
STRIPPED_PREMISES = {"imp*": (0,), "cut": (0,)}


class RuleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NestedDerivation:
    conclusion: NestedSequent
    rule: str
    premises: tuple["NestedDerivation", ...] = ()
    path: Path = ()
    principal: Optional[Formula] = None
    bracket: Optional[int] = None
    extra: Optional[NestedSequent] = None

    @cached_property
    def height(self) -> int:
        if not self.premises:
            return 0
        return 1 + max(p.height for p in self.premises)

    @cached_property
    def rank(self) -> int:
        own = weight(self.principal) + 1 if self.rule == "cut" else 0
        return max([own] + [p.rank for p in self.premises])

    @cached_property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)

    @cached_property
    def rules_used(self) -> frozenset:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used
        return frozenset(out)

    def rep_formulas(self) -> list[Formula]:
        return [n.principal for n in self.nodes() if n.rule == "rep"]

    def nodes(self) -> Iterator["NestedDerivation"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.premises)

    @property
    def cut_free(self) -> bool:
        return "cut" not in self.rules_used

    @property
    def pure(self) -> bool:
        """Only rules of the calculus itself."""
        return self.rules_used <= set(LOGICAL_RULES)

    def with_premises(self, premises: Iterable["NestedDerivation"]) -> "NestedDerivation":
        return NestedDerivation(
            self.conclusion, self.rule, tuple(premises), self.path, self.principal, self.bracket, self.extra
        )


def node(
    conclusion: NestedSequent,
    rule: str,
    premises=(),
    path: Path = (),
    principal: Optional[Formula] = None,
    bracket: Optional[int] = None,
    extra: Optional[NestedSequent] = None,
) -> NestedDerivation:
    return NestedDerivation(conclusion, rule, tuple(premises), tuple(path), principal, bracket, extra)


# ---------------------------------------------------------------- schemas


def premises_for(
    g: NestedSequent,
    rule: str,
    path: Path = (),
    principal: Optional[Formula] = None,
    bracket: Optional[int] = None,
    extra: Optional[NestedSequent] = None,
) -> tuple[NestedSequent, ...]:
    """The premises of ``rule`` applied to ``g`` as described, or RuleError."""
    try:
        comp = g.at(path)
    except (IndexError, TypeError):
        raise RuleError(f"no component at {path}") from None
    f = principal

    def put(c: NestedSequent) -> NestedSequent:
        return g.replace_at(path, c)

    def need_input(kind) -> NestedSequent:
        if not isinstance(f, kind) or f not in comp.inputs:
            raise RuleError(f"{rule}: no matching input formula")
        return comp.without_inputs([f])

    def need_output(kind) -> None:
        if not isinstance(f, kind) or comp.output != f:
            raise RuleError(f"{rule}: no matching output formula")

    def need_bracket() -> Bracket:
        if bracket is None or not 0 <= bracket < len(comp.brackets):
            raise RuleError(f"{rule}: no bracket at position {bracket}")
        return comp.brackets[bracket]

    def swap_bracket(c: NestedSequent, b: Bracket) -> NestedSequent:
        bs = c.brackets[:bracket] + (b,) + c.brackets[bracket + 1:]
        return NestedSequent(c.inputs, c.output, bs)

    if rule == "init":
        if not isinstance(f, Atom) or f not in comp.inputs or comp.output != f:
            raise RuleError("init: needs p* and p^ in one component")
        return ()
    if rule == "bot*":
        if f != BOT or BOT not in comp.inputs:
            raise RuleError("bot*: no false* in the component")
        return ()
    if rule == "and*":
        rest = need_input(And)
        return (put(rest.plus(NestedSequent((f.left, f.right)))),)
    if rule == "and^":
        need_output(And)
        return (put(comp.with_output(f.left)), put(comp.with_output(f.right)))
    if rule == "or*":
        rest = need_input(Or)
        return (put(rest.plus(NestedSequent((f.left,)))), put(rest.plus(NestedSequent((f.right,)))))
    if rule in ("or^1", "or^2"):
        need_output(Or)
        return (put(comp.with_output(f.left if rule == "or^1" else f.right)),)
    if rule == "imp*":
        rest = need_input(Imp)
        first = g.stripped().add(path, NestedSequent((), f.left))
        return (first, put(rest.plus(NestedSequent((f.right,)))))
    if rule == "imp^":
        need_output(Imp)
        return (put(NestedSequent(comp.inputs + (f.left,), f.right, comp.brackets)),)
    if rule == "box*":
        need_input(CondBox)
        b = need_bracket()
        main = swap_bracket(comp, Bracket(b.index, b.body.plus(NestedSequent((f.right,)))))
        return (top_level(f.left, b.index), top_level(b.index, f.left), put(main))
    if rule == "box^":
        need_output(CondBox)
        fresh = Bracket(f.left, NestedSequent((), f.right))
        return (put(NestedSequent(comp.inputs, None, comp.brackets + (fresh,))),)
    if rule == "dia*":
        rest = need_input(CondDiam)
        fresh = Bracket(f.left, NestedSequent((f.right,)))
        return (put(NestedSequent(rest.inputs, rest.output, rest.brackets + (fresh,))),)
    if rule == "dia^":
        need_output(CondDiam)
        b = need_bracket()
        main = swap_bracket(comp.with_output(None), Bracket(b.index, b.body.plus(NestedSequent((), f.right))))
        return (top_level(f.left, b.index), top_level(b.index, f.left), put(main))
    # structural rules
    if rule == "w":
        if extra is None or not extra.is_input:
            raise RuleError("w: the weakened part must be an input sequent")
        try:
            rest, _ = comp.minus(extra)
        except MalformedNested as e:
            raise RuleError(f"w: {e}") from None
        return (put(rest),)
    if rule == "nec":
        if path or g.inputs or g.output is not None or len(g.brackets) != 1:
            raise RuleError("nec: the conclusion must be a single bracket")
        b = g.brackets[0]
        if f is not None and b.index != f:
            raise RuleError("nec: wrong index")
        return (b.body,)
    if rule == "m":
        b = need_bracket()
        if extra is None:
            raise RuleError("m: the split-off part is missing")
        try:
            rest, _ = b.body.minus(extra)
        except MalformedNested as e:
            raise RuleError(f"m: {e}") from None
        split = swap_bracket(comp, Bracket(b.index, rest))
        return (put(NestedSequent(split.inputs, split.output, split.brackets + (Bracket(b.index, extra),))),)
    if rule == "c":
        if f is None or f not in comp.inputs:
            raise RuleError("c: no matching input formula")
        return (put(comp.plus(NestedSequent((f,)))),)
    if rule == "cut":
        if f is None:
            raise RuleError("cut: no cut formula")
        return (g.stripped().add(path, NestedSequent((), f)), g.add(path, NestedSequent((f,))))
    if rule == "rep":
        b = need_bracket()
        if f is None:
            raise RuleError("rep: no replaced index")
        return (top_level(f, b.index), top_level(b.index, f), put(swap_bracket(comp, Bracket(f, b.body))))
    raise RuleError(f"unknown rule {rule!r}")


@dataclass(frozen=True)
class NestedInstance:
    rule: str
    path: Path
    principal: Formula
    bracket: Optional[int]
    premises: tuple[NestedSequent, ...] = field(compare=False)

    def build(self, conclusion: NestedSequent, subs) -> NestedDerivation:
        return node(conclusion, self.rule, subs, self.path, self.principal, self.bracket)


_INPUT_RULES = {And: ("and*",), Or: ("or*",), Imp: ("imp*",), CondDiam: ("dia*",)}
_OUTPUT_RULES = {And: ("and^",), Or: ("or^1", "or^2"), Imp: ("imp^",), CondBox: ("box^",)}


def _check_nested(goal: NestedSequent) -> None:
    n = goal.count_outputs()
    if n != 1:
        raise MalformedNested(f"a nested sequent needs exactly one output formula, found {n}")


def nested_rule_instances(goal: NestedSequent) -> list[NestedInstance]:
    """Every application of a rule of the calculus to ``goal``, at any depth."""
    _check_nested(goal)
    out: list[NestedInstance] = []

    def emit(rule, path, f, k=None):
        out.append(NestedInstance(rule, path, f, k, premises_for(goal, rule, path, f, k)))

    for path, comp in goal.walk():
        for f in dict.fromkeys(comp.inputs):
            if isinstance(f, Atom) and comp.output == f:
                emit("init", path, f)
            elif f == BOT:
                emit("bot*", path, f)
            elif isinstance(f, CondBox):
                for k in range(len(comp.brackets)):
                    emit("box*", path, f, k)
            else:
                for rule in _INPUT_RULES.get(type(f), ()):
                    emit(rule, path, f)
        g = comp.output
        if g is None:
            continue
        if isinstance(g, CondDiam):
            for k in range(len(comp.brackets)):
                emit("dia^", path, g, k)
        for rule in _OUTPUT_RULES.get(type(g), ()):
            emit(rule, path, g)
    return out


# ---------------------------------------------------------------- checking


def find_nested_error(
    d: NestedDerivation, allow: Iterable[str] = ()
) -> Optional[tuple[tuple[int, ...], str]]:
    """First invalid node as (premise-index path, message), or None.

    ``allow`` names structural rules accepted besides the calculus.
    """
    allowed = set(LOGICAL_RULES) | set(allow)
    stack = [((), d)]
    seen: set[int] = set()
    while stack:
        where, n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if n.rule not in allowed:
            return where, f"rule {n.rule!r} is not allowed"
        if n.conclusion.count_outputs() != 1:
            return where, f"not a nested sequent: {n.conclusion}"
        try:
            expected = premises_for(n.conclusion, n.rule, n.path, n.principal, n.bracket, n.extra)
        except (RuleError, MalformedNested) as e:
            return where, str(e)
        got = tuple(p.conclusion for p in n.premises)
        if len(got) != len(expected):
            return where, f"{n.rule} needs {len(expected)} premises, found {len(got)}"
        for i, (a, b) in enumerate(zip(expected, got)):
            if a != b:
                return where, f"premise {i} of {n.rule} should be {a}, found {b}"
        for i, p in enumerate(n.premises):
            stack.append((where + (i,), p))
    return None


def check_nested(d: NestedDerivation, allow: Iterable[str] = ()) -> bool:
    return find_nested_error(d, allow) is None


# ---------------------------------------------------------------- formats


def nested_to_json(d: NestedDerivation) -> dict:
    obj: dict = {"rule": d.rule, "sequent": str(d.conclusion), "path": list(d.path)}
    if d.principal is not None:
        obj["principal"] = to_text(d.principal)
    if d.bracket is not None:
        obj["bracket"] = d.bracket
    if d.extra is not None:
        obj["extra"] = str(d.extra)
    obj["premises"] = [nested_to_json(p) for p in d.premises]
    return obj


def nested_from_json(obj) -> NestedDerivation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    principal = obj.get("principal")
    extra = obj.get("extra")
    return NestedDerivation(
        parse_nested(obj["sequent"]),
        obj["rule"],
        tuple(nested_from_json(p) for p in obj.get("premises", [])),
        tuple(obj.get("path", ())),
        parse(principal) if principal is not None else None,
        obj.get("bracket"),
        parse_nested(extra) if extra is not None else None,
    )


_LATEX_RULE = {
    "init": r"\mathsf{init}", "bot*": r"\bot^{\bullet}",
    "and*": r"\land^{\bullet}", "and^": r"\land^{\circ}", "or*": r"\lor^{\bullet}",
    "or^1": r"\lor^{\circ}_1", "or^2": r"\lor^{\circ}_2", "imp*": r"\to^{\bullet}", "imp^": r"\to^{\circ}",
    "box*": r"\boxdot^{\bullet}", "box^": r"\boxdot^{\circ}", "dia*": r"\diamond^{\bullet}",
    "dia^": r"\diamond^{\circ}", "w": r"\mathsf{w}", "nec": r"[\mathsf{nec}]", "m": r"[\mathsf{m}]",
    "c": r"\mathsf{c}", "cut": r"\mathsf{cut}", "rep": r"\mathsf{rep}",
}


def latex_nested(ns: NestedSequent) -> str:
    items = [to_latex(f) + r"^{\bullet}" for f in ns.inputs]
    if ns.output is not None:
        items.append(to_latex(ns.output) + r"^{\circ}")
    items += [f"[{to_latex(b.index)} : {latex_nested(b.body)}]" for b in ns.brackets]
    return ", ".join(items) if items else r"\emptyset"


def nested_to_latex(d: NestedDerivation) -> str:
    """Proof tree for the ``ebproof`` package."""
    lines: list[str] = []

    def emit(n: NestedDerivation) -> None:
        for p in n.premises:
            emit(p)
        lines.append(f"\\infer{len(n.premises)}[${_LATEX_RULE.get(n.rule, n.rule)}$]{{{latex_nested(n.conclusion)}}}")

    emit(d)
    return "\\begin{prooftree}\n" + "\n".join(lines) + "\n\\end{prooftree}"


def render_nested(d: NestedDerivation, indent: str = "") -> str:
    out = [f"{indent}{d.conclusion}    [{d.rule}]"]
    for p in d.premises:
        out.append(render_nested(p, indent + "  "))
    return "\n".join(out)
