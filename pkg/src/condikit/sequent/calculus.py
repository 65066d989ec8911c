"""Gentzen sequents, the rule systems, and the derivation checker."""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Optional

from ..formula import (
    BOT,
    And,
    Atom,
    CondBox,
    CondDiam,
    Formula,
    Imp,
    Or,
    Parser,
    ParseError,
    is_diamond_free,
    parse,
    to_latex,
    to_text,
)


class LogicId(enum.Enum):
    CONSTCKBOX = "constckbox"
    CONSTCK = "constck"
    CCKID = "cckid"
    CCKMP = "cckmp"
    CCKMPID = "cckmpid"
    CCKCEM = "cckcem"
    CK = "ck"
    INTCK = "intck"

    @property
    def classical(self) -> bool:
        return self is LogicId.CK

    @property
    def diamonds(self) -> bool:
        return self is not LogicId.CONSTCKBOX

    @property
    def identity(self) -> bool:
        return self in (LogicId.CCKID, LogicId.CCKMPID)

    @property
    def modus_ponens(self) -> bool:
        return self in (LogicId.CCKMP, LogicId.CCKMPID)

    @property
    def cem(self) -> bool:
        return self is LogicId.CCKCEM

    @classmethod
    def parse(cls, name: str) -> "LogicId":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown logic {name!r}") from None


SEQUENT_LOGICS = tuple(l for l in LogicId if l is not LogicId.INTCK)

PROPOSITIONAL_SINGLE = ("init", "botL", "andL", "andR", "orL", "orR1", "orR2", "impR", "impL")
PROPOSITIONAL_MULTI = ("init", "botL", "andL", "andR", "orL", "orR", "impR", "impL")
CONDITIONAL_RULES = (
    "cb", "cd", "cbd", "cb_id", "cd_id", "cbd_id", "cd_cem", "cbd_cem", "ck_box", "ck_dia",
)


def rules_of(logic: LogicId) -> tuple[str, ...]:
    if logic is LogicId.CK:
        return PROPOSITIONAL_MULTI + ("ck_box", "ck_dia")
    if logic is LogicId.INTCK:
        raise ValueError("intck has no flat sequent calculus; use the nested engine")
    rules = list(PROPOSITIONAL_SINGLE)
    suffix = "_id" if logic.identity else ""
    rules.append("cb" + suffix)
    if logic.diamonds:
        if logic.cem:
            rules += ["cd_cem", "cbd_cem"]
        else:
            rules += ["cd" + suffix, "cbd" + suffix]
    if logic.modus_ponens:
        rules += ["mp_box", "mp_dia"]
    return tuple(rules)


class MalformedSequent(ValueError):
    pass


@dataclass(frozen=True)
class Sequent:
    """A pair of multisets, stored as sorted tuples."""

    ant: tuple[Formula, ...]
    suc: tuple[Formula, ...] = ()
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ant", tuple(sorted(self.ant)))
        object.__setattr__(self, "suc", tuple(sorted(self.suc)))
        object.__setattr__(self, "_hash", hash((self.ant, self.suc)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        left = ", ".join(to_text(f) for f in self.ant)
        right = ", ".join(to_text(f) for f in self.suc)
        return f"{left} => {right}".strip()

    def add_ant(self, *fs: Formula) -> "Sequent":
        return Sequent(self.ant + fs, self.suc)

    def remove_ant(self, f: Formula) -> tuple[Formula, ...]:
        i = self.ant.index(f)
        return self.ant[:i] + self.ant[i + 1:]

    def remove_suc(self, f: Formula) -> tuple[Formula, ...]:
        i = self.suc.index(f)
        return self.suc[:i] + self.suc[i + 1:]

    def normalized(self) -> tuple[frozenset, frozenset]:
        return frozenset(self.ant), frozenset(self.suc)

    def formulas(self) -> Iterator[Formula]:
        yield from self.ant
        yield from self.suc


def equivalence(a: Formula, b: Formula) -> tuple[Sequent, Sequent]:
    """The two sequents abbreviated by a <=> b."""
    return Sequent((a,), (b,)), Sequent((b,), (a,))


def check_goal(goal: Sequent, logic: LogicId) -> None:
    if logic is LogicId.INTCK:
        raise MalformedSequent("intck goals are nested sequents")
    if not logic.classical and len(goal.suc) > 1:
        raise MalformedSequent(f"{logic.value} allows at most one succedent formula")
    if not logic.diamonds and not all(is_diamond_free(f) for f in goal.formulas()):
        raise MalformedSequent("constckbox sequents must be diamond-free")


@dataclass(frozen=True)
class Instance:
    """One backward application of a rule.

    ``principal`` is the principal formula; ``boxes`` the would-formulas
    selected from the antecedent of a conditional rule; ``diamonds`` the
    extra might-formulas (antecedent ones for the cem rules, succedent ones
    for the classical rules); ``target`` the succedent might-formula of cd.
    """

    rule: str
    premises: tuple[Sequent, ...]
    principal: Optional[Formula] = None
    boxes: tuple[Formula, ...] = ()
    diamonds: tuple[Formula, ...] = ()
    target: Optional[Formula] = None

    @property
    def conditional(self) -> bool:
        return self.rule in CONDITIONAL_RULES


def _submultisets(items: tuple[Formula, ...]) -> Iterator[tuple[Formula, ...]]:
    seen = set()
    for k in range(len(items) + 1):
        for combo in combinations(items, k):
            if combo not in seen:
                seen.add(combo)
                yield combo


def _equivs(phi: Formula, others: Iterable[Formula]) -> tuple[Sequent, ...]:
    out: list[Sequent] = []
    for o in others:
        out.extend(equivalence(phi, o.left))
    return tuple(out)


def conditional_instance(
    rule: str,
    principal: Formula,
    boxes: tuple[Formula, ...],
    diamonds: tuple[Formula, ...] = (),
    target: Optional[Formula] = None,
) -> Instance:
    """Build the premises of a conditional rule from its selected formulas."""
    sigmas = tuple(b.right for b in boxes)
    if rule in ("cb", "cb_id"):
        phi, psi = principal.left, principal.right
        main = Sequent(sigmas + ((phi,) if rule == "cb_id" else ()), (psi,))
        prem = _equivs(phi, boxes) + (main,)
    elif rule in ("cd", "cd_id", "cd_cem"):
        phi, psi = principal.left, principal.right
        extra = (phi,) if rule == "cd_id" else ()
        chis = tuple(d.right for d in diamonds)
        main = Sequent(sigmas + chis + extra + (psi,), (target.right,))
        prem = _equivs(phi, boxes) + _equivs(phi, diamonds) + equivalence(phi, target.left) + (main,)
    elif rule in ("cbd", "cbd_id", "cbd_cem"):
        phi, psi = principal.left, principal.right
        extra = (phi,) if rule == "cbd_id" else ()
        chis = tuple(d.right for d in diamonds)
        main = Sequent(sigmas + chis + extra + (psi,), ())
        prem = _equivs(phi, boxes) + _equivs(phi, diamonds) + (main,)
    elif rule == "ck_box":
        phi, psi = principal.left, principal.right
        main = Sequent(sigmas, (psi,) + tuple(d.right for d in diamonds))
        prem = _equivs(phi, boxes) + _equivs(phi, diamonds) + (main,)
    elif rule == "ck_dia":
        phi, psi = principal.left, principal.right
        main = Sequent(sigmas + (psi,), tuple(d.right for d in diamonds))
        prem = _equivs(phi, boxes) + _equivs(phi, diamonds) + (main,)
    else:
        raise ValueError(rule)
    return Instance(rule, prem, principal, boxes, diamonds, target)


def _distinct(fs: Iterable[Formula], kind) -> list[Formula]:
    out: list[Formula] = []
    for f in fs:
        if isinstance(f, kind) and f not in out:
            out.append(f)
    return out


def propositional_instances(goal: Sequent, logic: LogicId) -> Iterator[Instance]:
    ant, suc = goal.ant, goal.suc
    multi = logic.classical
    for f in _distinct(ant, Atom):
        if f in suc:
            yield Instance("init", (), f)
    if BOT in ant:
        yield Instance("botL", (), BOT)
    for f in _distinct(ant, And):
        yield Instance("andL", (Sequent(goal.remove_ant(f) + (f.left, f.right), suc),), f)
    for f in _distinct(ant, Or):
        rest = goal.remove_ant(f)
        yield Instance("orL", (Sequent(rest + (f.left,), suc), Sequent(rest + (f.right,), suc)), f)
    for f in _distinct(suc, And):
        rest = goal.remove_suc(f)
        yield Instance("andR", (Sequent(ant, rest + (f.left,)), Sequent(ant, rest + (f.right,))), f)
    for f in _distinct(suc, Or):
        rest = goal.remove_suc(f)
        if multi:
            yield Instance("orR", (Sequent(ant, rest + (f.left, f.right)),), f)
        else:
            yield Instance("orR1", (Sequent(ant, (f.left,)),), f)
            yield Instance("orR2", (Sequent(ant, (f.right,)),), f)
    for f in _distinct(suc, Imp):
        rest = goal.remove_suc(f)
        yield Instance("impR", (Sequent(ant + (f.left,), rest + (f.right,)),), f)
    for f in _distinct(ant, Imp):
        rest = goal.remove_ant(f)
        if multi:
            first = Sequent(rest, suc + (f.left,))
        else:
            first = Sequent(ant, (f.left,))
        yield Instance("impL", (first, Sequent(rest + (f.right,), suc)), f)


def conditional_instances(
    goal: Sequent, logic: LogicId, box_filter=None, dia_filter=None
) -> Iterator[Instance]:
    """Conditional rule instances.

    Without filters every sub-multiset of antecedent would-formulas is
    enumerated.  The prover passes ``box_filter(phi, boxes)`` and
    ``dia_filter`` callbacks which instead return the single maximal
    selection whose antecedents are provably equivalent to ``phi``.
    """
    ant, suc = goal.ant, goal.suc
    boxes = tuple(f for f in ant if isinstance(f, CondBox))
    left_dias = tuple(f for f in ant if isinstance(f, CondDiam))

    def box_sets(phi: Formula):
        if box_filter is not None:
            return [box_filter(phi, boxes)]
        return list(_submultisets(boxes))

    def dia_sets(phi: Formula, pool: tuple[Formula, ...]):
        if dia_filter is not None:
            return [dia_filter(phi, pool)]
        return list(_submultisets(pool))

    if logic.classical:
        right_dias = tuple(f for f in suc if isinstance(f, CondDiam))
        for f in _distinct(suc, CondBox):
            for bs in box_sets(f.left):
                for ds in dia_sets(f.left, right_dias):
                    yield conditional_instance("ck_box", f, bs, ds)
        for f in _distinct(ant, CondDiam):
            for bs in box_sets(f.left):
                for ds in dia_sets(f.left, right_dias):
                    yield conditional_instance("ck_dia", f, bs, ds)
        return

    suffix = "_id" if logic.identity else ""
    for f in _distinct(suc, CondBox):
        for bs in box_sets(f.left):
            yield conditional_instance("cb" + suffix, f, bs)
    if logic.diamonds:
        targets = _distinct(suc, CondDiam)
        for f in _distinct(ant, CondDiam):
            others = _drop_one(left_dias, f)
            for bs in box_sets(f.left):
                dsets = dia_sets(f.left, others) if logic.cem else [()]
                for ds in dsets:
                    for t in targets:
                        rule = "cd_cem" if logic.cem else "cd" + suffix
                        yield conditional_instance(rule, f, bs, ds, t)
                    rule = "cbd_cem" if logic.cem else "cbd" + suffix
                    yield conditional_instance(rule, f, bs, ds)
    if logic.modus_ponens:
        for f in _distinct(ant, CondBox):
            yield Instance("mp_box", (Sequent(ant, (f.left,)), Sequent(ant + (f.right,), suc)), f)
        for f in _distinct(suc, CondDiam):
            yield Instance("mp_dia", (Sequent(ant, (f.left,)), Sequent(ant, (f.right,))), f)


def _drop_one(items: tuple[Formula, ...], f: Formula) -> tuple[Formula, ...]:
    i = items.index(f)
    return items[:i] + items[i + 1:]


def rule_instances(goal: Sequent, logic: LogicId) -> list[Instance]:
    """Every backward rule application to ``goal`` in ``logic``."""
    check_goal(goal, logic)
    out = list(propositional_instances(goal, logic))
    out += conditional_instances(goal, logic)
    return out


# ---------------------------------------------------------------- derivations


@dataclass(frozen=True)
class SeqDerivation:
    conclusion: Sequent
    rule: str
    premises: tuple["SeqDerivation", ...] = ()

    @property
    def height(self) -> int:
        if not self.premises:
            return 0
        return 1 + max(p.height for p in self.premises)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def rules_used(self) -> set[str]:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used()
        return out


def _premises_match(inst: Instance, premises: tuple[Sequent, ...]) -> bool:
    if len(inst.premises) != len(premises):
        return False
    if inst.conditional:
        return inst.premises[-1] == premises[-1] and Counter(inst.premises[:-1]) == Counter(premises[:-1])
    return inst.premises == premises


def match_instance(d: SeqDerivation, logic: LogicId) -> Optional[Instance]:
    """The rule instance that licenses the last step of ``d``, if any."""
    if d.rule not in rules_of(logic):
        return None
    try:
        check_goal(d.conclusion, logic)
    except MalformedSequent:
        return None
    prem = tuple(p.conclusion for p in d.premises)
    if d.rule in CONDITIONAL_RULES or d.rule in ("mp_box", "mp_dia"):
        pool = conditional_instances(d.conclusion, logic)
    else:
        pool = propositional_instances(d.conclusion, logic)
    for inst in pool:
        if inst.rule == d.rule and _premises_match(inst, prem):
            return inst
    return None


def find_error(d: SeqDerivation, logic: LogicId) -> Optional[tuple[tuple[int, ...], str]]:
    """First invalid node as (path of premise indices, message), or None."""
    stack = [((), d)]
    while stack:
        path, node = stack.pop()
        if node.rule not in rules_of(logic):
            return path, f"rule {node.rule!r} is not part of {logic.value}"
        try:
            check_goal(node.conclusion, logic)
        except MalformedSequent as e:
            return path, str(e)
        if match_instance(node, logic) is None:
            return path, f"not an instance of {node.rule}: {node.conclusion}"
        for i, p in enumerate(node.premises):
            stack.append((path + (i,), p))
    return None


def check_derivation(d: SeqDerivation, logic: LogicId) -> bool:
    return find_error(d, logic) is None


# ---------------------------------------------------------------- formats


def parse_sequent(text: str) -> Sequent:
    """Read ``a, b => c``.  A bare formula means ``=> formula``."""
    p = Parser(text)
    sides: list[list[Formula]] = [[]]
    if p.tok.kind == "end":
        raise ParseError("empty sequent", 0)
    while p.tok.kind != "end":
        if p.at("=>"):
            if len(sides) == 2:
                raise ParseError("second '=>'", p.tok.pos)
            p.advance()
            sides.append([])
            continue
        sides[-1].append(p.formula())
        if p.at(","):
            p.advance()
        elif not (p.at("=>") or p.tok.kind == "end"):
            raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    if len(sides) == 1:
        return Sequent((), tuple(sides[0]))
    return Sequent(tuple(sides[0]), tuple(sides[1]))


def to_json(d: SeqDerivation) -> dict:
    return {
        "rule": d.rule,
        "sequent": {
            "ant": [to_text(f) for f in d.conclusion.ant],
            "suc": [to_text(f) for f in d.conclusion.suc],
        },
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(obj) -> SeqDerivation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    seq = Sequent(
        tuple(parse(s) for s in obj["sequent"]["ant"]),
        tuple(parse(s) for s in obj["sequent"]["suc"]),
    )
    return SeqDerivation(seq, obj["rule"], tuple(from_json(p) for p in obj.get("premises", [])))


_LATEX_RULE = {
    "init": r"\mathsf{init}", "botL": r"\bot_L", "andL": r"\land_L", "andR": r"\land_R",
    "orL": r"\lor_L", "orR": r"\lor_R", "orR1": r"\lor_{R1}", "orR2": r"\lor_{R2}",
    "impR": r"\to_R", "impL": r"\to_L",
}


def latex_sequent(s: Sequent) -> str:
    left = ", ".join(to_latex(f) for f in s.ant)
    right = ", ".join(to_latex(f) for f in s.suc)
    return f"{left} \\Rightarrow {right}"


def to_latex_tree(d: SeqDerivation) -> str:
    """Proof tree for the ``ebproof`` package."""
    lines: list[str] = []

    def emit(node: SeqDerivation) -> None:
        for p in node.premises:
            emit(p)
        label = _LATEX_RULE.get(node.rule, r"\mathsf{" + node.rule.replace("_", r"\_") + "}")
        lines.append(f"\\infer{len(node.premises)}[${label}$]{{{latex_sequent(node.conclusion)}}}")

    emit(d)
    return "\\begin{prooftree}\n" + "\n".join(lines) + "\n\\end{prooftree}"


def render_tree(d: SeqDerivation, indent: str = "") -> str:
    out = [f"{indent}{d.conclusion}    [{d.rule}]"]
    for p in d.premises:
        out.append(render_tree(p, indent + "  "))
    return "\n".join(out)
