"""Proof theory and semantics for constructive conditional logics."""

from .formula import (
    Atom,
    Bot,
    And,
    Or,
    Imp,
    CondBox,
    CondDiam,
    Formula,
    Polarity,
    ParseError,
    parse,
    to_text,
    weight,
    is_diamond_free,
    random_formula,
)

__all__ = [
    "Atom",
    "Bot",
    "And",
    "Or",
    "Imp",
    "CondBox",
    "CondDiam",
    "Formula",
    "Polarity",
    "ParseError",
    "parse",
    "to_text",
    "weight",
    "is_diamond_free",
    "random_formula",
]

__version__ = "0.1.0"
