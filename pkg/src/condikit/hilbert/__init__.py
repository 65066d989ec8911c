"""Axiom systems, Hilbert proofs, derived-rule templates and the compiler
from sequent derivations."""

from .compile import CompileError, compile_to_hilbert, iota, macro_expand, macro_premises, MACROS
from .modal import ModalBox, ModalDiamond, modal_translate, parse_modal, wk_axioms
from .proof import Axiom, HilbertCheck, HilbertProof, Hypothesis, Line, Rule, check_hilbert
from .schemas import AXIOMS, CHARACTERISTIC, RULES, SYSTEMS, AxiomId, axiom_instance, match

__all__ = [
    "AXIOMS", "CHARACTERISTIC", "RULES", "SYSTEMS", "MACROS", "AxiomId", "Axiom", "Rule",
    "Hypothesis", "Line", "HilbertProof", "HilbertCheck", "check_hilbert", "compile_to_hilbert",
    "iota", "macro_expand", "macro_premises", "CompileError", "axiom_instance", "match",
    "ModalBox", "ModalDiamond", "modal_translate", "parse_modal", "wk_axioms",
]
