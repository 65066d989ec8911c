"""Unary modal formulas and their translation into conditionals.

Necessity becomes a would-conditional and possibility a might-conditional,
both with antecedent ``true``; everything else is translated homomorphically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..formula import BOT, TOP, And, Atom, Bot, CondBox, CondDiam, Formula, Imp, Or, Parser, neg, to_text


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class _Unary(Formula):
    body: Formula
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    TAG = 10
    SYMBOL = "?"

    def __post_init__(self) -> None:
        key = (self.TAG, self.body._key)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __str__(self) -> str:
        return self.SYMBOL + to_text(self.body, 4)


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class ModalBox(_Unary):
    TAG = 10
    SYMBOL = "[]"


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class ModalDiamond(_Unary):
    TAG = 11
    SYMBOL = "<>"


def parse_modal(text: str) -> Formula:
    """Parse the propositional grammar extended with prefix ``[]`` and ``<>``."""
    p = Parser(text, modal=True)
    f = p.formula()
    p.finish()
    return f


def modal_translate(f: Formula) -> Formula:
    if isinstance(f, ModalBox):
        return CondBox(TOP, modal_translate(f.body))
    if isinstance(f, ModalDiamond):
        return CondDiam(TOP, modal_translate(f.body))
    if isinstance(f, (Atom, Bot)):
        return f
    if isinstance(f, (And, Or, Imp)):
        return type(f)(modal_translate(f.left), modal_translate(f.right))
    raise ValueError(f"not a modal formula: {f!r}")


def wk_axioms(a: Formula = Atom("p"), b: Formula = Atom("q")) -> list[Formula]:
    """The two distribution axioms and the no-empty-possibility axiom, instantiated."""
    return [
        Imp(ModalBox(Imp(a, b)), Imp(ModalBox(a), ModalBox(b))),
        Imp(ModalBox(Imp(a, b)), Imp(ModalDiamond(a), ModalDiamond(b))),
        neg(ModalDiamond(BOT)),
    ]
