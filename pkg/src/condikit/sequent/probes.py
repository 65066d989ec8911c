"""Randomized checks of the structural meta-properties."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional

from ..formula import And, CondBox, CondDiam, Formula, Imp, Or, is_diamond_free, random_formula
from ..results import BudgetExceeded, SearchBudget
from .calculus import LogicId, Sequent
from .prover import min_height, prove


class ProbeKind(enum.Enum):
    WEAKENING = "weakening"
    CONTRACTION = "contraction"
    CUT = "cut"


@dataclass
class ProbeReport:
    kind: ProbeKind
    logic: LogicId
    trials: int
    counterexamples: list = field(default_factory=list)
    height_increases: list = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.height_increases


PROBE_BUDGET = SearchBudget(depth=40, nodes=50_000)


class _Sampler:
    """Random sequents biased towards provable ones."""

    def __init__(self, logic: LogicId, rng: random.Random):
        self.logic = logic
        self.rng = rng

    def formula(self, max_weight: int) -> Formula:
        return random_formula(max_weight, 2, self.logic.diamonds, self.rng.getrandbits(32))

    def sequent(self) -> Sequent:
        rng = self.rng
        goal = self.formula(3)
        ant = [self.formula(2) for _ in range(rng.randint(0, 2))]
        roll = rng.random()
        if roll < 0.2:
            ant.append(goal)
        elif roll < 0.3:
            ant.append(And(goal, self.formula(1)))
        elif roll < 0.45:
            x = self.formula(1)
            ant += [x, Imp(x, goal)]
        elif roll < 0.7:
            goal = self._conditional(ant)
        suc: tuple[Formula, ...] = (goal,)
        if self.logic.classical and rng.random() < 0.5:
            suc += (self.formula(2),)
        elif not self.logic.classical and rng.random() < 0.1:
            suc = ()
        return Sequent(tuple(ant), suc)

    def _conditional(self, ant: list[Formula]) -> Formula:
        """Add conditional premises to ``ant`` and return a goal they support."""
        rng = self.rng
        a, b, c = self.formula(1), self.formula(1), self.formula(1)
        a2 = And(a, a) if rng.random() < 0.3 else a
        if not self.logic.diamonds or rng.random() < 0.5:
            ant += [CondBox(a2, b), CondBox(a, c)]
            return CondBox(a, rng.choice([And(b, c), Or(b, c), b]))
        ant += [CondDiam(a2, b), CondBox(a, c)]
        return CondDiam(a, rng.choice([And(b, c), Or(b, c), b]))

    def provable(self, attempts: int = 60) -> Optional[Sequent]:
        for _ in range(attempts):
            s = self.sequent()
            if prove(s, self.logic, PROBE_BUDGET).proved:
                return s
        return None


def _height(s: Sequent, logic: LogicId) -> Optional[int]:
    try:
        d = min_height(s, logic, limit=14, node_limit=400_000)
    except BudgetExceeded:
        return None
    return None if d is None else d.height


def admissibility_probe(kind: ProbeKind, logic: LogicId, trials: int, seed: int) -> ProbeReport:
    """Synthesize provable premises, apply the structural rule, re-prove.

    For weakening and contraction the minimal heights of premise and
    conclusion are also compared; a trial whose heights cannot be computed
    within the height search limits is counted as skipped for that part.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    kind = ProbeKind(kind)
    rng = random.Random(seed)
    sampler = _Sampler(logic, rng)
    report = ProbeReport(kind, logic, trials)
    for _ in range(trials):
        if kind is ProbeKind.CUT:
            _cut_trial(sampler, logic, report)
            continue
        premise = sampler.provable()
        if premise is None:
            report.skipped += 1
            continue
        if kind is ProbeKind.WEAKENING:
            conclusion = _weaken(premise, sampler)
        else:
            if not premise.ant:
                premise = Sequent((premise.suc[0],) if premise.suc else (), premise.suc)
            dup = rng.choice(premise.ant)
            premise, conclusion = premise.add_ant(dup), premise
        if not prove(conclusion, logic, PROBE_BUDGET).proved:
            report.counterexamples.append((premise, conclusion))
            continue
        hp, hc = _height(premise, logic), _height(conclusion, logic)
        if hp is None or hc is None:
            report.skipped += 1
        elif hc > hp:
            report.height_increases.append((premise, conclusion, hp, hc))
    return report


def _weaken(s: Sequent, sampler: _Sampler) -> Sequent:
    extra = sampler.formula(2)
    if sampler.logic.classical and sampler.rng.random() < 0.5:
        return Sequent(s.ant, s.suc + (extra,))
    if not s.suc and sampler.rng.random() < 0.5:
        return Sequent(s.ant, (extra,))
    return s.add_ant(extra)


def _cut_trial(sampler: _Sampler, logic: LogicId, report: ProbeReport) -> None:
    """Find Gamma => phi (,D) and Gamma', phi => D' provable; check the cut."""
    rng = sampler.rng
    for _ in range(80):
        left = sampler.provable()
        if left is None or not left.suc:
            continue
        phi = rng.choice(left.suc)
        rest = list(left.suc)
        rest.remove(phi)
        goal = sampler.formula(3)
        ctx = [sampler.formula(2) for _ in range(rng.randint(0, 1))]
        roll = rng.random()
        if roll < 0.4:
            ctx.append(Imp(phi, goal))
        elif roll < 0.6:
            goal = phi
        right = Sequent(tuple(ctx) + (phi,), (goal,))
        if not prove(right, logic, PROBE_BUDGET).proved:
            continue
        conclusion = Sequent(left.ant + tuple(ctx), tuple(rest) + right.suc)
        if not logic.classical and len(conclusion.suc) > 1:
            continue
        if not prove(conclusion, logic, PROBE_BUDGET).proved:
            report.counterexamples.append((left, right, conclusion))
        return
    report.skipped += 1


def conservativity_probe(f: Formula, budget: SearchBudget = SearchBudget()) -> Optional[bool]:
    """Compare ConstCK and ConstCKBox on a diamond-free formula.

    True when the verdicts agree, False when they differ, None when either
    side ran out of budget.
    """
    if not is_diamond_free(f):
        raise ValueError("conservativity probe needs a diamond-free formula")
    goal = Sequent((), (f,))
    a = prove(goal, LogicId.CONSTCK, budget)
    b = prove(goal, LogicId.CONSTCKBOX, budget)
    if not (a.conclusive and b.conclusive):
        return None
    return a.status is b.status
