"""The nested calculus: sequents, rules, search and cut elimination."""

from .rules import (
    LOGICAL_RULES,
    STRUCTURAL_RULES,
    NestedDerivation,
    NestedInstance,
    RuleError,
    check_nested,
    find_nested_error,
    latex_nested,
    nested_from_json,
    nested_rule_instances,
    nested_to_json,
    nested_to_latex,
    node,
    premises_for,
    render_nested,
)
from .search import NestedProver, prove_nested, prove_nested_formula
from .structure import (
    EMPTY,
    Bracket,
    MalformedNested,
    NestedContext,
    NestedSequent,
    interpret,
    map_path,
    nested_goal,
    parse_context,
    parse_nested,
    single,
    top_level,
)
from .structural import (
    StructuralError,
    apply_structural,
    contract,
    generalized_init,
    invert,
    medial,
    necessitate,
    weaken,
)
from .cut import CutError, cut_on, eliminate_cut, eliminate_rep, normalize, reduce_cut

__all__ = [
    "LOGICAL_RULES",
    "STRUCTURAL_RULES",
    "NestedDerivation",
    "NestedInstance",
    "RuleError",
    "check_nested",
    "find_nested_error",
    "latex_nested",
    "nested_from_json",
    "nested_rule_instances",
    "nested_to_json",
    "nested_to_latex",
    "node",
    "premises_for",
    "render_nested",
    "NestedProver",
    "prove_nested",
    "prove_nested_formula",
    "EMPTY",
    "Bracket",
    "MalformedNested",
    "NestedContext",
    "NestedSequent",
    "interpret",
    "map_path",
    "nested_goal",
    "parse_context",
    "parse_nested",
    "single",
    "top_level",
    "StructuralError",
    "apply_structural",
    "contract",
    "generalized_init",
    "invert",
    "medial",
    "necessitate",
    "weaken",
    "CutError",
    "cut_on",
    "eliminate_cut",
    "eliminate_rep",
    "normalize",
    "reduce_cut",
]
