"""Backward proof search in the nested calculus.

Strategy:

* ``init`` and ``bot*`` are tried first, in any component;
* the invertible rules and*, imp^, box^, dia*, and^, or* are applied
  eagerly.  They consume their principal formula, so they terminate;
* box* is applied as a saturation step to each pair of a would-formula and
  a sibling bracket whose index is provably equivalent to its antecedent.
  A pair is used once per branch, and never when the consequent is
  already in the bracket;
* the choice points are or^1/or^2, dia^ into an equivalent bracket, and
  imp* on any input implication.  At a choice point the goal, read with
  multiplicities forgotten, must not repeat an earlier choice-point goal of
  the same branch;
* saturation and choice steps count against the depth limit, which is
  raised by iterative deepening up to the budget.

Equivalence of two indices is decided by two top-level searches, memoised.
A refutation means the whole loop-checked space below the depth limit was
exhausted without reaching that limit.
"""

from __future__ import annotations

from typing import Iterator, Optional

from ..formula import BOT, And, Atom, CondBox, CondDiam, Formula, Imp, Or
from ..results import BudgetExceeded, ProofResult, SearchBudget, Status
from .rules import NestedDerivation, _check_nested, node, premises_for
from .structure import NestedSequent, Path, nested_goal, top_level

_SIMPLE = {And: "and*", CondDiam: "dia*"}
_SIMPLE_OUT = {Imp: "imp^", CondBox: "box^"}

Mark = tuple[Path, int, Formula]


class NestedProver:
    def __init__(self, budget: SearchBudget = SearchBudget()):
        self.budget = budget
        self.nodes = 0
        self.proven: dict[NestedSequent, NestedDerivation] = {}
        self._equiv_ok: dict[tuple[Formula, Formula], tuple[NestedDerivation, NestedDerivation]] = {}
        self._reset(budget.depth)

    def _reset(self, limit: int) -> None:
        self.limit = limit
        self.cuts = 0
        self.depth_hit = False
        self.failed: set = set()
        self._equiv_no: set = set()
        self._pending: set = set()
        self._history: set = set()

    # ------------------------------------------------------------ public

    def prove(self, goal: NestedSequent) -> ProofResult:
        _check_nested(goal)
        limits = []
        n = min(8, self.budget.depth)
        while n < self.budget.depth:
            limits.append(n)
            n *= 2
        limits.append(self.budget.depth)
        try:
            for limit in limits:
                self._reset(limit)
                d = self.solve(goal, 0, frozenset())
                if d is not None:
                    return ProofResult(Status.PROVED, d, self.nodes)
                if not self.depth_hit:
                    return ProofResult(Status.REFUTED, None, self.nodes)
        except BudgetExceeded:
            pass
        return ProofResult(Status.BUDGET_EXHAUSTED, None, self.nodes)

    # ------------------------------------------------------------ search

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.nodes:
            raise BudgetExceeded()

    def equivalence(self, a: Formula, b: Formula) -> Optional[tuple[NestedDerivation, NestedDerivation]]:
        """Derivations of ``a*, b^`` and ``b*, a^``, if both are found."""
        key = (a, b)
        if key in self._equiv_ok:
            return self._equiv_ok[key]
        if key in self._equiv_no:
            return None
        if key in self._pending:
            self.cuts += 1
            return None
        self._pending.add(key)
        saved = self._history
        self._history = set()
        cuts_before = self.cuts
        try:
            d1 = self.solve(top_level(a, b), 0, frozenset())
            d2 = self.solve(top_level(b, a), 0, frozenset()) if d1 is not None else None
        finally:
            self._history = saved
            self._pending.discard(key)
        if d1 is None or d2 is None:
            if self.cuts == cuts_before:
                self._equiv_no.add(key)
            return None
        self._equiv_ok[key] = (d1, d2)
        self._equiv_ok[(b, a)] = (d2, d1)
        return d1, d2

    def solve(self, goal: NestedSequent, depth: int, marks: frozenset) -> Optional[NestedDerivation]:
        self._tick()
        hit = self.proven.get(goal)
        if hit is not None:
            return hit
        if (goal, marks) in self.failed:
            return None
        ax = _axiom(goal)
        if ax is not None:
            self.proven[goal] = ax
            return ax
        cuts_before = self.cuts
        d = self._expand(goal, depth, marks)
        if d is not None:
            self.proven[goal] = d
        elif self.cuts == cuts_before:
            self.failed.add((goal, marks))
        return d

    def _expand(self, goal: NestedSequent, depth: int, marks: frozenset) -> Optional[NestedDerivation]:
        step = _eager(goal)
        if step is not None:
            rule, path, f = step
            return self._apply(goal, rule, path, f, None, depth, marks)
        if depth >= self.limit:
            self.depth_hit = True
            self.cuts += 1
            return None
        for path, k, f in self._saturation(goal, marks):
            return self._apply(goal, "box*", path, f, k, depth + 1, marks | {(path, k, f)})
        key = goal.normalized()
        if key in self._history:
            self.cuts += 1
            return None
        self._history.add(key)
        try:
            for rule, path, f, k in self._choices(goal):
                d = self._apply(goal, rule, path, f, k, depth + 1, marks)
                if d is not None:
                    return d
        finally:
            self._history.discard(key)
        return None

    def _saturation(self, goal: NestedSequent, marks: frozenset) -> Iterator[Mark]:
        for path, comp in goal.walk():
            for f in dict.fromkeys(comp.inputs):
                if not isinstance(f, CondBox):
                    continue
                for k, b in enumerate(comp.brackets):
                    if (path, k, f) in marks or f.right in b.body.inputs:
                        continue
                    if self.equivalence(f.left, b.index) is not None:
                        yield path, k, f

    def _choices(self, goal: NestedSequent) -> Iterator[tuple[str, Path, Formula, Optional[int]]]:
        out_path = goal.output_path()
        comp = goal.at(out_path)
        g = comp.output
        if isinstance(g, Or):
            yield "or^1", out_path, g, None
            yield "or^2", out_path, g, None
        if isinstance(g, CondDiam):
            for k, b in enumerate(comp.brackets):
                if self.equivalence(g.left, b.index) is not None:
                    yield "dia^", out_path, g, k
        for path, c in goal.walk():
            for f in dict.fromkeys(c.inputs):
                if isinstance(f, Imp):
                    yield "imp*", path, f, None

    def _apply(self, goal, rule, path, f, k, depth, marks) -> Optional[NestedDerivation]:
        prems = premises_for(goal, rule, path, f, k)
        subs = []
        if rule in ("box*", "dia^"):
            subs.extend(self.equivalence(f.left, goal.at(path).brackets[k].index))
            prems = prems[2:]
        for p in prems:
            d = self.solve(p, depth, marks)
            if d is None:
                return None
            subs.append(d)
        return node(goal, rule, subs, path, f, k)


def _axiom(goal: NestedSequent) -> Optional[NestedDerivation]:
    for path, comp in goal.walk():
        if BOT in comp.inputs:
            return node(goal, "bot*", (), path, BOT)
        g = comp.output
        if isinstance(g, Atom) and g in comp.inputs:
            return node(goal, "init", (), path, g)
    return None


def _eager(goal: NestedSequent) -> Optional[tuple[str, Path, Formula]]:
    branching = None
    for path, comp in goal.walk():
        for f in comp.inputs:
            rule = _SIMPLE.get(type(f))
            if rule:
                return rule, path, f
            if branching is None and isinstance(f, Or):
                branching = "or*", path, f
        g = comp.output
        if g is not None:
            rule = _SIMPLE_OUT.get(type(g))
            if rule:
                return rule, path, g
            if isinstance(g, And):
                branching = "and^", path, g
    return branching


def prove_nested(goal: NestedSequent, budget: SearchBudget = SearchBudget()) -> ProofResult:
    """Search for a derivation of ``goal`` using only the calculus rules."""
    return NestedProver(budget).prove(goal)


def prove_nested_formula(f: Formula, budget: SearchBudget = SearchBudget()) -> ProofResult:
    return prove_nested(nested_goal(f), budget)
