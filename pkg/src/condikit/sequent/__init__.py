"""Flat Gentzen calculi: rule systems, proof search and probes."""

from .calculus import (
    Instance,
    LogicId,
    MalformedSequent,
    SEQUENT_LOGICS,
    SeqDerivation,
    Sequent,
    check_derivation,
    equivalence,
    find_error,
    from_json,
    parse_sequent,
    rule_instances,
    rules_of,
    to_json,
    to_latex_tree,
)
from .prover import SequentProver, min_height, prove, prove_formula

__all__ = [
    "Instance",
    "LogicId",
    "MalformedSequent",
    "SEQUENT_LOGICS",
    "SeqDerivation",
    "Sequent",
    "SequentProver",
    "check_derivation",
    "equivalence",
    "find_error",
    "from_json",
    "min_height",
    "parse_sequent",
    "prove",
    "prove_formula",
    "rule_instances",
    "rules_of",
    "to_json",
    "to_latex_tree",
]
