"""Backward proof search for the flat sequent calculi.

Strategy:

* axioms (init, botL) are tried first;
* invertible propositional rules are applied eagerly (andL, orL, impR,
  andR; in the classical calculus every propositional rule);
* the remaining rules are choice points: orR1/orR2, impL, the conditional
  rules and the mp rules;
* a conditional rule is tried once per principal formula, selecting the
  maximal set of would-formulas (and might-formulas, for cem and the
  classical rules) whose antecedents are provably equivalent to the
  principal antecedent.  Adding more selected formulas only weakens the
  main premise, so nothing is lost;
* a branch is cut when the goal at a choice point, read as a pair of sets,
  repeats an earlier choice-point goal on the same branch.

Goals only ever contain subformulas of the root, so every branch is finite
and an exhausted search is a refutation relative to this strategy.
"""

from __future__ import annotations

from typing import Iterator, Optional

from ..formula import Formula
from ..results import BudgetExceeded, ProofResult, SearchBudget, Status
from .calculus import (
    Instance,
    LogicId,
    SeqDerivation,
    Sequent,
    check_goal,
    conditional_instances,
    propositional_instances,
    rule_instances,
)

_EAGER_SINGLE = ("andL", "impR", "andR", "orL")
_EAGER_MULTI = ("andL", "orR", "impR", "andR", "orL", "impL")


class SequentProver:
    def __init__(self, logic: LogicId, budget: SearchBudget = SearchBudget()):
        self.logic = logic
        self.budget = budget
        self.nodes = 0
        self.cuts = 0
        self.depth_hit = False
        self.proven: dict[Sequent, SeqDerivation] = {}
        self.failed: set[Sequent] = set()
        self._equiv: dict[tuple[Formula, Formula], bool] = {}
        self._history: set = set()

    # ------------------------------------------------------------ public

    def prove(self, goal: Sequent) -> ProofResult:
        check_goal(goal, self.logic)
        try:
            d = self.solve(goal, 0)
        except BudgetExceeded:
            return ProofResult(Status.BUDGET_EXHAUSTED, None, self.nodes)
        if d is not None:
            return ProofResult(Status.PROVED, d, self.nodes)
        if self.depth_hit:
            return ProofResult(Status.BUDGET_EXHAUSTED, None, self.nodes)
        return ProofResult(Status.REFUTED, None, self.nodes)

    # ------------------------------------------------------------ search

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.nodes:
            raise BudgetExceeded()

    def equivalent(self, a: Formula, b: Formula) -> bool:
        key = (a, b)
        if key not in self._equiv:
            saved = self._history
            self._history = set()
            try:
                ok = self.solve(Sequent((a,), (b,)), 0) is not None and (
                    self.solve(Sequent((b,), (a,)), 0) is not None
                )
            finally:
                self._history = saved
            self._equiv[key] = ok
            self._equiv[(b, a)] = ok
        return self._equiv[key]

    def _select(self, phi: Formula, pool: tuple[Formula, ...]) -> tuple[Formula, ...]:
        return tuple(f for f in pool if self.equivalent(phi, f.left))

    def solve(self, goal: Sequent, depth: int) -> Optional[SeqDerivation]:
        self._tick()
        hit = self.proven.get(goal)
        if hit is not None:
            return hit
        if goal in self.failed:
            return None
        for inst in propositional_instances(goal, self.logic):
            if inst.rule in ("init", "botL"):
                d = SeqDerivation(goal, inst.rule)
                self.proven[goal] = d
                return d
        if depth >= self.budget.depth:
            self.depth_hit = True
            self.cuts += 1
            return None
        cuts_before = self.cuts
        d = self._expand(goal, depth)
        if d is not None:
            self.proven[goal] = d
        elif self.cuts == cuts_before:
            self.failed.add(goal)
        return d

    def _expand(self, goal: Sequent, depth: int) -> Optional[SeqDerivation]:
        eager = _EAGER_MULTI if self.logic.classical else _EAGER_SINGLE
        props = list(propositional_instances(goal, self.logic))
        for inst in props:
            if inst.rule in eager:
                return self._try(goal, inst, depth)
        # Eager steps shrink the goal, so repetitions can only arise
        # between choice points; the history is kept there.
        key = goal.normalized()
        if key in self._history:
            self.cuts += 1
            return None
        self._history.add(key)
        try:
            for inst in self._choices(goal, props):
                d = self._try(goal, inst, depth)
                if d is not None:
                    return d
        finally:
            self._history.discard(key)
        return None

    def _choices(self, goal: Sequent, props: list[Instance]) -> Iterator[Instance]:
        for inst in props:
            if inst.rule in ("orR1", "orR2"):
                yield inst
        dia_filter = self._select if (self.logic.cem or self.logic.classical) else None
        for inst in conditional_instances(goal, self.logic, self._select, dia_filter):
            if inst.rule != "mp_box":
                yield inst
        for inst in conditional_instances(goal, self.logic, self._select, dia_filter):
            if inst.rule == "mp_box":
                yield inst
        for inst in props:
            if inst.rule == "impL":
                yield inst

    def _try(self, goal: Sequent, inst: Instance, depth: int) -> Optional[SeqDerivation]:
        subs = []
        for p in inst.premises:
            d = self.solve(p, depth + 1)
            if d is None:
                return None
            subs.append(d)
        return SeqDerivation(goal, inst.rule, tuple(subs))


def prove(goal: Sequent, logic: LogicId, budget: SearchBudget = SearchBudget()) -> ProofResult:
    """Search for a derivation of ``goal``.

    Refuted means the loop-checked search space above was exhausted.
    """
    return SequentProver(logic, budget).prove(goal)


def prove_formula(f: Formula, logic: LogicId, budget: SearchBudget = SearchBudget()) -> ProofResult:
    return prove(Sequent((), (f,)), logic, budget)


# ---------------------------------------------------------------- heights


class _HeightSearch:
    """Exact minimal-height derivations by iterative deepening.

    Every rule instance is a choice here, including every sub-multiset
    selection of the conditional rules, because a larger selection can
    add taller equivalence premises.
    """

    def __init__(self, logic: LogicId, node_limit: int):
        self.logic = logic
        self.node_limit = node_limit
        self.nodes = 0
        self.best: dict[Sequent, SeqDerivation] = {}
        self.fails_below: dict[Sequent, int] = {}
        self._inst: dict[Sequent, list[Instance]] = {}

    def within(self, goal: Sequent, h: int) -> Optional[SeqDerivation]:
        d = self.best.get(goal)
        if d is not None and d.height <= h:
            return d
        if self.fails_below.get(goal, -1) >= h:
            return None
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceeded()
        insts = self._inst.get(goal)
        if insts is None:
            insts = rule_instances(goal, self.logic)
            insts.sort(key=lambda i: len(i.premises))
            self._inst[goal] = insts
        found = None
        for inst in insts:
            if not inst.premises:
                found = SeqDerivation(goal, inst.rule)
                break
            if h == 0:
                continue
            subs = []
            for p in inst.premises:
                sd = self.within(p, h - 1)
                if sd is None:
                    break
                subs.append(sd)
            else:
                found = SeqDerivation(goal, inst.rule, tuple(subs))
                break
        if found is None:
            self.fails_below[goal] = max(self.fails_below.get(goal, -1), h)
        else:
            self.best[goal] = found
        return found


def min_height(
    goal: Sequent, logic: LogicId, limit: int = 12, node_limit: int = 2_000_000
) -> Optional[SeqDerivation]:
    """A derivation of minimal height, or None if none exists up to ``limit``.

    Raises BudgetExceeded when ``node_limit`` is reached.
    """
    check_goal(goal, logic)
    search = _HeightSearch(logic, node_limit)
    for h in range(limit + 1):
        d = search.within(goal, h)
        if d is not None:
            return d
    return None
