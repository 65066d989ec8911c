"""Axiom and rule schemas, and the axiom systems built from them.

Schemas are ordinary formulas whose atoms ``φ ψ χ ρ`` act as
metavariables; matching binds each metavariable to one formula.
"""

from __future__ import annotations

import enum
from typing import Optional

from ..formula import BOT, TOP, And, Atom, CondBox, CondDiam, Formula, Imp, Or, iff, neg
from ..sequent.calculus import LogicId

PHI, PSI, CHI, RHO = Atom("φ"), Atom("ψ"), Atom("χ"), Atom("ρ")
METAVARS = frozenset({PHI, PSI, CHI, RHO})


def box(a, b):
    return CondBox(a, b)


def dia(a, b):
    return CondDiam(a, b)


class AxiomId(enum.Enum):
    K = "K"
    S = "S"
    AND_E1 = "AndE1"
    AND_E2 = "AndE2"
    AND_I = "AndI"
    OR_I1 = "OrI1"
    OR_I2 = "OrI2"
    OR_E = "OrE"
    EFQ = "EFQ"
    EM = "EM"
    CM_BOX = "CM⊡"
    CC_BOX = "CC⊡"
    CN_BOX = "CN⊡"
    CM_DIA = "CM⟐"
    CC_DIA = "CC⟐"
    CN_DIA = "CN⟐"
    CW = "CW"
    CFS = "CFS"
    CK_DIA = "CK⟐"
    DEF_DIA = "def⟐"
    ID_BOX = "ID⊡"
    MP_BOX = "MP⊡"
    MP_DIA = "MP⟐"
    CEM_BOX = "CEM⊡"
    CEM_DIA = "CEM⟐"

    @classmethod
    def parse(cls, name: str) -> "AxiomId":
        for a in cls:
            if name in (a.value, a.name):
                return a
        raise ValueError(f"unknown axiom {name!r}")

    @property
    def schema(self) -> Formula:
        return AXIOMS[self]


# Intuitionistic propositional base: K, S, the conjunction and disjunction
# schemas, and ex falso.  Negation is defined, so nothing else is needed.
AXIOMS: dict[AxiomId, Formula] = {
    AxiomId.K: Imp(PHI, Imp(PSI, PHI)),
    AxiomId.S: Imp(Imp(PHI, Imp(PSI, CHI)), Imp(Imp(PHI, PSI), Imp(PHI, CHI))),
    AxiomId.AND_E1: Imp(And(PHI, PSI), PHI),
    AxiomId.AND_E2: Imp(And(PHI, PSI), PSI),
    AxiomId.AND_I: Imp(PHI, Imp(PSI, And(PHI, PSI))),
    AxiomId.OR_I1: Imp(PHI, Or(PHI, PSI)),
    AxiomId.OR_I2: Imp(PSI, Or(PHI, PSI)),
    AxiomId.OR_E: Imp(Imp(PHI, CHI), Imp(Imp(PSI, CHI), Imp(Or(PHI, PSI), CHI))),
    AxiomId.EFQ: Imp(BOT, PHI),
    AxiomId.EM: Or(PHI, neg(PHI)),
    AxiomId.CM_BOX: Imp(box(PHI, And(PSI, CHI)), And(box(PHI, PSI), box(PHI, CHI))),
    AxiomId.CC_BOX: Imp(And(box(PHI, PSI), box(PHI, CHI)), box(PHI, And(PSI, CHI))),
    AxiomId.CN_BOX: box(PHI, TOP),
    AxiomId.CM_DIA: Imp(Or(dia(PHI, PSI), dia(PHI, CHI)), dia(PHI, Or(PSI, CHI))),
    AxiomId.CC_DIA: Imp(dia(PHI, Or(PSI, CHI)), Or(dia(PHI, PSI), dia(PHI, CHI))),
    AxiomId.CN_DIA: neg(dia(PHI, BOT)),
    AxiomId.CW: Imp(And(dia(PHI, PSI), box(PHI, CHI)), dia(PHI, And(PSI, CHI))),
    AxiomId.CFS: Imp(Imp(dia(PHI, PSI), box(PHI, CHI)), box(PHI, Imp(PSI, CHI))),
    AxiomId.CK_DIA: Imp(box(PHI, Imp(PSI, CHI)), Imp(dia(PHI, PSI), dia(PHI, CHI))),
    AxiomId.DEF_DIA: iff(dia(PHI, PSI), neg(box(PHI, neg(PSI)))),
    AxiomId.ID_BOX: box(PHI, PHI),
    AxiomId.MP_BOX: Imp(box(PHI, PSI), Imp(PHI, PSI)),
    AxiomId.MP_DIA: Imp(And(PHI, PSI), dia(PHI, PSI)),
    AxiomId.CEM_BOX: Or(box(PHI, PSI), box(PHI, neg(PSI))),
    AxiomId.CEM_DIA: Imp(And(dia(PHI, PSI), dia(PHI, CHI)), dia(PHI, And(PSI, CHI))),
}

IPL = (
    AxiomId.K, AxiomId.S, AxiomId.AND_E1, AxiomId.AND_E2, AxiomId.AND_I,
    AxiomId.OR_I1, AxiomId.OR_I2, AxiomId.OR_E, AxiomId.EFQ,
)

# Inference rules: (premise schemas, conclusion schema).
RULES: dict[str, tuple[tuple[Formula, ...], Formula]] = {
    "MP": ((PHI, Imp(PHI, PSI)), PSI),
    "RA⊡": ((iff(PHI, RHO),), iff(box(PHI, PSI), box(RHO, PSI))),
    "RC⊡": ((iff(PSI, CHI),), iff(box(PHI, PSI), box(PHI, CHI))),
    "RA⟐": ((iff(PHI, RHO),), iff(dia(PHI, PSI), dia(RHO, PSI))),
    "RC⟐": ((iff(PSI, CHI),), iff(dia(PHI, PSI), dia(PHI, CHI))),
}


class HilbertSystem:
    def __init__(self, name: str, axioms, rules, diamonds: bool = True):
        self.name = name
        self.axioms = frozenset(axioms)
        self.rules = frozenset(rules)
        self.diamonds = diamonds

    def __repr__(self) -> str:
        return f"HilbertSystem({self.name})"


_A = AxiomId
_BOX_RULES = ("MP", "RA⊡", "RC⊡")
_ALL_RULES = _BOX_RULES + ("RA⟐", "RC⟐")
_BOX_AXIOMS = (_A.CM_BOX, _A.CC_BOX, _A.CN_BOX)
_CONSTCK = IPL + _BOX_AXIOMS + (_A.CN_DIA, _A.CK_DIA)

SYSTEMS: dict[LogicId, HilbertSystem] = {
    LogicId.CONSTCKBOX: HilbertSystem("constckbox", IPL + _BOX_AXIOMS, _BOX_RULES, diamonds=False),
    LogicId.CONSTCK: HilbertSystem("constck", _CONSTCK, _ALL_RULES),
    LogicId.CCKID: HilbertSystem("cckid", _CONSTCK + (_A.ID_BOX,), _ALL_RULES),
    LogicId.CCKMP: HilbertSystem("cckmp", _CONSTCK + (_A.MP_BOX, _A.MP_DIA), _ALL_RULES),
    LogicId.CCKMPID: HilbertSystem("cckmpid", _CONSTCK + (_A.ID_BOX, _A.MP_BOX, _A.MP_DIA), _ALL_RULES),
    LogicId.CCKCEM: HilbertSystem("cckcem", _CONSTCK + (_A.CEM_DIA,), _ALL_RULES),
    LogicId.INTCK: HilbertSystem(
        "intck",
        IPL + _BOX_AXIOMS + (_A.CM_DIA, _A.CC_DIA, _A.CN_DIA, _A.CW, _A.CFS),
        _ALL_RULES,
    ),
    LogicId.CK: HilbertSystem("ck", IPL + (_A.EM,) + _BOX_AXIOMS + (_A.DEF_DIA,), _BOX_RULES),
}

# The characteristic axioms of each logic beyond the propositional base.
CHARACTERISTIC: dict[LogicId, tuple[AxiomId, ...]] = {
    logic: tuple(a for a in AxiomId if a in sys.axioms and a not in IPL and a is not _A.EM)
    for logic, sys in SYSTEMS.items()
}


def match(schema: Formula, f: Formula, binding: Optional[dict] = None) -> Optional[dict]:
    """Extend ``binding`` so that ``schema`` instantiates to ``f``, or None."""
    binding = dict(binding or {})
    stack = [(schema, f)]
    while stack:
        s, g = stack.pop()
        if s in METAVARS:
            bound = binding.get(s)
            if bound is None:
                binding[s] = g
            elif bound != g:
                return None
        elif type(s) is not type(g):
            return None
        elif isinstance(s, Atom):
            if s.name != g.name:
                return None
        elif hasattr(s, "left"):
            stack.append((s.left, g.left))
            stack.append((s.right, g.right))
    return binding


def instantiate(schema: Formula, binding: dict) -> Formula:
    if schema in METAVARS:
        try:
            return binding[schema]
        except KeyError:
            raise KeyError(f"metavariable {schema.name} is unbound") from None
    if hasattr(schema, "left"):
        return type(schema)(instantiate(schema.left, binding), instantiate(schema.right, binding))
    return schema


def axiom_instance(ax: AxiomId, **kw: Formula) -> Formula:
    """Instantiate an axiom; keywords are phi, psi, chi, rho."""
    names = {"phi": PHI, "psi": PSI, "chi": CHI, "rho": RHO}
    return instantiate(AXIOMS[ax], {names[k]: v for k, v in kw.items()})


def matches_axiom(ax: AxiomId, f: Formula) -> bool:
    return match(AXIOMS[ax], f) is not None


def rule_conclusion_ok(rule: str, premises: list[Formula], conclusion: Formula) -> bool:
    prem_schemas, concl_schema = RULES[rule]
    if len(prem_schemas) != len(premises):
        return False
    b: Optional[dict] = {}
    for s, f in zip(prem_schemas, premises):
        b = match(s, f, b)
        if b is None:
            return False
    return match(concl_schema, conclusion, b) is not None
