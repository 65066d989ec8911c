"""Command-line front end.

Exit codes: 0 proved / valid / suite passed, 1 refuted / countermodel found /
suite failed, 2 inconclusive, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .formula import And, Formula, ParseError, parse, to_text
from .hilbert import AxiomId, CompileError, axiom_instance, check_hilbert, compile_to_hilbert, modal_translate, parse_modal
from .nested import (
    MalformedNested,
    check_nested,
    find_nested_error,
    nested_from_json,
    nested_goal,
    nested_to_json,
    nested_to_latex,
    parse_nested,
    prove_nested,
    render_nested,
)
from .results import ProofResult, SearchBudget, Status
from .semantics import (
    ModelClass,
    ModelFormatError,
    Model,
    check_frame,
    find_countermodel,
    parse_model,
    random_model,
    satisfies,
    valid_in,
)
from .sequent import LogicId, check_derivation, find_error, from_json, prove_formula, to_json, to_latex_tree
from .sequent.calculus import render_tree

OK, FAIL, INCONCLUSIVE, USAGE = 0, 1, 2, 64

_EXIT = {Status.PROVED: OK, Status.REFUTED: FAIL, Status.BUDGET_EXHAUSTED: INCONCLUSIVE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# flag name -> commands accepting it
_FLAGS = {
    "logic": {"prove", "check-derivation", "compile-hilbert"},
    "budget_depth": {"prove", "prove-nested", "compile-hilbert", "conformance"},
    "budget_nodes": {"prove", "prove-nested", "compile-hilbert", "conformance"},
    "max_worlds": {"countermodel"},
    "seed": {"conformance"},
    "json": {"prove", "prove-nested", "countermodel", "check-model", "check-derivation",
             "compile-hilbert", "translate", "conformance"},
    "latex": {"prove", "prove-nested"},
    "class_": {"countermodel", "check-model"},
}


def _parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--logic", choices=[l.value for l in LogicId])
    common.add_argument("--budget-depth", type=int)
    common.add_argument("--budget-nodes", type=int)
    common.add_argument("--max-worlds", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--json", action="store_true", default=None)
    common.add_argument("--latex", action="store_true", default=None)
    common.add_argument("--class", dest="class_", choices=[c.value for c in ModelClass])

    p = _Parser(prog="condikit", description="Provers and models for constructive conditional logics.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("prove", parents=[common], help="prove a formula in a sequent calculus").add_argument("formula")
    sub.add_parser("prove-nested", parents=[common], help="prove a nested sequent or formula").add_argument("goal")
    sub.add_parser("countermodel", parents=[common], help="search for a finite countermodel").add_argument("formula")
    cm = sub.add_parser("check-model", parents=[common], help="check a model file against a class")
    cm.add_argument("model")
    cm.add_argument("formula", nargs="?")
    sub.add_parser("check-derivation", parents=[common], help="check a JSON derivation").add_argument("file")
    ch = sub.add_parser("compile-hilbert", parents=[common], help="compile a sequent derivation into a Hilbert proof")
    src = ch.add_mutually_exclusive_group(required=True)
    src.add_argument("formula", nargs="?")
    src.add_argument("--derivation", metavar="FILE")
    sub.add_parser("translate", parents=[common], help="translate a modal formula").add_argument("formula")
    sub.add_parser("conformance", parents=[common], help="run the theorem and non-theorem matrix")
    return p


def _flag(dest: str) -> str:
    return "--" + dest.rstrip("_").replace("_", "-")


def _validate(args: argparse.Namespace) -> None:
    for dest, commands in _FLAGS.items():
        if getattr(args, dest, None) is not None and args.command not in commands:
            raise UsageError(f"{_flag(dest)} is not accepted by {args.command}")
    for dest in ("budget_depth", "budget_nodes", "max_worlds"):
        v = getattr(args, dest)
        if v is not None and v < 1:
            raise UsageError(f"{_flag(dest)} must be positive")
    if args.json and args.latex:
        raise UsageError("--json and --latex cannot be combined")


def _text(arg: str) -> str:
    return sys.stdin.read().strip() if arg == "-" else arg


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    with open(arg, encoding="utf-8") as fh:
        return fh.read()


def _formula(arg: str) -> Formula:
    try:
        return parse(_text(arg))
    except ParseError as e:
        raise UsageError(f"cannot parse formula: {e}") from None


def _budget(args) -> SearchBudget:
    d = SearchBudget()
    return SearchBudget(args.budget_depth or d.depth, args.budget_nodes or d.nodes)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CONDIKIT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"CONDIKIT_SEED must be an integer, got {env!r}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False, indent=2))


# ---------------------------------------------------------------- commands


def _report_proof(args, res: ProofResult, nested: bool, goal: str, logic: str) -> int:
    d = res.derivation
    if args.json:
        obj = {"logic": logic, "goal": goal, "status": res.status.value, "nodes": res.nodes, "derivation": None}
        if d is not None:
            obj["derivation"] = nested_to_json(d) if nested else to_json(d)
        _emit(obj)
    elif args.latex and d is not None:
        print(nested_to_latex(d) if nested else to_latex_tree(d))
    else:
        print(f"{res.status.value}: {goal} ({logic}, {res.nodes} nodes)")
        if d is not None:
            print(render_nested(d) if nested else render_tree(d))
    return _EXIT[res.status]


def cmd_prove(args) -> int:
    f = _formula(args.formula)
    logic = LogicId(args.logic or "constck")
    if logic is LogicId.INTCK:
        return _report_proof(args, prove_nested(nested_goal(f), _budget(args)), True, to_text(f), logic.value)
    return _report_proof(args, prove_formula(f, logic, _budget(args)), False, to_text(f), logic.value)


def cmd_prove_nested(args) -> int:
    text = _text(args.goal)
    try:
        goal = parse_nested(text)
    except ValueError:
        try:
            goal = nested_goal(parse(text))
        except ParseError as e:
            raise UsageError(f"cannot parse nested sequent or formula: {e}") from None
    try:
        res = prove_nested(goal, _budget(args))
    except MalformedNested as e:
        raise UsageError(str(e)) from None
    return _report_proof(args, res, True, str(goal), "intck")


def _class(args, default: ModelClass = ModelClass.CCM) -> ModelClass:
    return ModelClass(args.class_) if args.class_ else default


def cmd_countermodel(args) -> int:
    f = _formula(args.formula)
    cls = _class(args)
    n = args.max_worlds or 3
    try:
        found = find_countermodel(f, cls, max_worlds=n)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.json:
        obj = {"formula": to_text(f), "class": cls.value, "max_worlds": n, "found": found is not None}
        if found:
            obj.update(model=found[0].to_json(), world=found[1])
        _emit(obj)
    elif found:
        m, w = found
        print(f"countermodel with {m.size} world(s); {to_text(f)} fails at world {w}")
        print(m.to_text(), end="")
    else:
        print(f"no countermodel with at most {n} world(s) in class {cls.value}")
    return FAIL if found else INCONCLUSIVE


def cmd_check_model(args) -> int:
    try:
        m = parse_model(_read(args.model))
    except (OSError, ModelFormatError) as e:
        raise UsageError(f"cannot read model: {e}") from None
    cls = _class(args)
    frame = check_frame(m, cls)
    f = _formula(args.formula) if args.formula else None
    failing = []
    if f is not None and frame:
        failing = [w for w in range(m.size) if not satisfies(m, w, f, cls.profile)]
    ok = bool(frame) and not failing
    if args.json:
        _emit({
            "class": cls.value,
            "frame": frame.ok,
            "condition": frame.condition,
            "witness": [sorted(x) if isinstance(x, frozenset) else x for x in frame.witness]
            if frame.witness else None,
            "formula": to_text(f) if f is not None else None,
            "failing_worlds": failing,
        })
    else:
        if frame:
            print(f"frame: ok for {cls.value}")
        else:
            print(f"frame: violates {frame.condition} at {frame.witness}")
        if f is not None and frame:
            print(f"{to_text(f)}: " + ("valid" if not failing else f"fails at {failing}"))
    return OK if ok else FAIL


def cmd_check_derivation(args) -> int:
    try:
        obj = json.loads(_read(args.file))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read derivation: {e}") from None
    obj = obj.get("derivation", obj) if isinstance(obj, dict) and "status" in obj else obj
    nested = isinstance(obj, dict) and isinstance(obj.get("sequent"), str)
    logic = LogicId(args.logic or ("intck" if nested else "constck"))
    if nested != (logic is LogicId.INTCK):
        raise UsageError(f"--logic {logic.value} does not match the derivation format")
    try:
        if nested:
            d = nested_from_json(obj)
            err = find_nested_error(d)
        else:
            d = from_json(obj)
            err = find_error(d, logic)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"malformed derivation: {e}") from None
    if args.json:
        _emit({"logic": logic.value, "valid": err is None,
               "path": list(err[0]) if err else None, "message": err[1] if err else None})
    elif err is None:
        print(f"valid {logic.value} derivation of {d.conclusion}")
    else:
        print(f"invalid at premise path {list(err[0])}: {err[1]}")
    return OK if err is None else FAIL


def cmd_compile_hilbert(args) -> int:
    logic = LogicId(args.logic or "constck")
    if logic is LogicId.INTCK:
        raise UsageError("--logic intck has no sequent-to-Hilbert compiler; use a flat calculus")
    if args.derivation:
        try:
            d = from_json(json.loads(_read(args.derivation)))
        except (OSError, KeyError, TypeError, ValueError) as e:
            raise UsageError(f"cannot read derivation: {e}") from None
    else:
        res = prove_formula(_formula(args.formula), logic, _budget(args))
        if not res.proved:
            print(f"{res.status.value}: nothing to compile")
            return _EXIT[res.status]
        d = res.derivation
    try:
        proof = compile_to_hilbert(d, logic)
    except CompileError as e:
        print(f"cannot compile: {e}")
        return FAIL
    verdict = check_hilbert(proof, logic)
    if args.json:
        _emit({"logic": logic.value, "checked": verdict.ok, "proof": proof.to_json()})
    else:
        print(proof.render(), end="")
        print("check: " + ("ok" if verdict else f"line {verdict.line}: {verdict.message}"))
    return OK if verdict else FAIL


def cmd_translate(args) -> int:
    try:
        f = parse_modal(_text(args.formula))
    except ParseError as e:
        raise UsageError(f"cannot parse modal formula: {e}") from None
    out = modal_translate(f)
    if args.json:
        _emit({"input": str(f), "output": to_text(out)})
    else:
        print(to_text(out))
    return OK


# ---------------------------------------------------------------- conformance


@dataclass
class Row:
    name: str
    logic: str
    expected: str
    got: str = ""
    seconds: float = 0.0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.got == self.expected


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def _instance(ax: AxiomId) -> Formula:
    p, q, r = parse("p"), parse("q"), parse("r")
    return axiom_instance(ax, phi=p, psi=q, chi=r)


def _verdict(f: Formula, logic: LogicId, budget: SearchBudget) -> tuple[str, str]:
    if logic is LogicId.INTCK:
        res = prove_nested(nested_goal(f), budget)
        if res.proved and not check_nested(res.derivation):
            return "invalid-derivation", ""
    else:
        res = prove_formula(f, logic, budget)
        if res.proved and not check_derivation(res.derivation, logic):
            return "invalid-derivation", ""
    return res.status.value, f"{res.nodes} nodes"


def _countermodel_row(f: Formula, cls: ModelClass, n: int,
                      require: Optional[Callable[[Model], bool]] = None, note: str = ""):
    def run() -> tuple[str, str]:
        found = find_countermodel(f, cls, max_worlds=n)
        if found is None:
            return "none", ""
        m, w = found
        if not check_frame(m, cls) or satisfies(m, w, f, cls.profile):
            return "unverified", ""
        if require is not None and not require(m):
            return "wrong-shape", f"{m.size} world(s)"
        return "found", f"{m.size} world(s){note}"
    return run


def _matrix(budget: SearchBudget, seed: int) -> list[tuple[Row, Callable[[], tuple[str, str]]]]:
    A, L = AxiomId, LogicId
    plan = []

    def prove_row(name: str, f: Formula, logic: LogicId, expected: Status) -> None:
        plan.append((Row(name, logic.value, expected.value), lambda: _verdict(f, logic, budget)))

    for ax in (A.CM_BOX, A.CC_BOX, A.CN_BOX):
        for logic in (L.CONSTCKBOX, L.CONSTCK, L.INTCK):
            prove_row(ax.value, _instance(ax), logic, Status.PROVED)
    for ax in (A.CN_DIA, A.CK_DIA, A.CW):
        prove_row(ax.value, _instance(ax), L.CONSTCK, Status.PROVED)
    for ax in (A.CM_DIA, A.CC_DIA, A.CN_DIA, A.CW, A.CFS):
        prove_row(ax.value, _instance(ax), L.INTCK, Status.PROVED)
    prove_row(A.ID_BOX.value, _instance(A.ID_BOX), L.CCKID, Status.PROVED)
    prove_row(A.MP_BOX.value, _instance(A.MP_BOX), L.CCKMP, Status.PROVED)
    prove_row(A.MP_DIA.value, _instance(A.MP_DIA), L.CCKMP, Status.PROVED)
    prove_row(A.CEM_DIA.value, _instance(A.CEM_DIA), L.CCKCEM, Status.PROVED)
    defdia = _instance(A.DEF_DIA)
    assert isinstance(defdia, And)
    prove_row("def⟐ (->)", defdia.left, L.CK, Status.PROVED)
    prove_row("def⟐ (<-)", defdia.right, L.CK, Status.PROVED)

    sep = parse("~~(true > false) -> (true > false)")
    prove_row(to_text(sep), sep, L.CONSTCKBOX, Status.REFUTED)
    prove_row(to_text(sep), sep, L.INTCK, Status.PROVED)
    em = parse("p | ~p")
    prove_row(to_text(em), em, L.CONSTCK, Status.REFUTED)
    plan.append((Row(f"countermodel {to_text(em)}", "ccm", "found"), _countermodel_row(em, ModelClass.CCM, 2)))
    prove_row(to_text(defdia.right), defdia.right, L.CONSTCK, Status.REFUTED)
    plan.append((Row(f"countermodel {to_text(defdia.right)}", "ccm", "found"),
                 _countermodel_row(defdia.right, ModelClass.CCM, 4)))
    pp = parse("p > p")
    prove_row(to_text(pp), pp, L.CONSTCK, Status.REFUTED)

    plan.append((Row(f"countermodel {to_text(pp)} violating (id)", "ccm", "found"),
                 _countermodel_row(pp, ModelClass.CCM, 2, lambda m: not check_frame(m, ModelClass.CCM_ID),
                                   ", violates (id)")))

    def pp_valid() -> tuple[str, str]:
        models = [random_model(ModelClass.CCM_ID, 4, seed + i) for i in range(200)]
        bad = sum(not valid_in(m, pp, ModelClass.CCM_ID.profile) for m in models)
        return ("valid" if not bad else "invalid"), f"200 models, {bad} failures"

    plan.append((Row(f"{to_text(pp)} on random ccm_id models", "ccm_id", "valid"), pp_valid))
    return plan


def conformance_suite(budget: SearchBudget = SearchBudget(), seed: int = 0) -> Report:
    """Run the theorem and non-theorem matrix, timing each row."""
    report = Report()
    for row, run in _matrix(budget, seed):
        t0 = time.perf_counter()
        row.got, row.detail = run()
        row.seconds = time.perf_counter() - t0
        report.rows.append(row)
    return report


def cmd_conformance(args) -> int:
    seed = _seed(args)
    report = conformance_suite(_budget(args), seed)
    if args.json:
        _emit({
            "ok": report.ok,
            "seed": seed,
            "rows": [
                {"name": r.name, "logic": r.logic, "expected": r.expected, "got": r.got,
                 "ok": r.ok, "seconds": round(r.seconds, 4), "detail": r.detail}
                for r in report.rows
            ],
        })
    else:
        width = max(len(r.name) for r in report.rows)
        for r in report.rows:
            mark = "PASS" if r.ok else "FAIL"
            print(f"{mark}  {r.name:<{width}}  {r.logic:<10}  {r.got:<16}  {r.seconds:7.3f}s  {r.detail}")
        passed = sum(r.ok for r in report.rows)
        print(f"{passed}/{len(report.rows)} rows passed")
    return OK if report.ok else FAIL


_COMMANDS = {
    "prove": cmd_prove,
    "prove-nested": cmd_prove_nested,
    "countermodel": cmd_countermodel,
    "check-model": cmd_check_model,
    "check-derivation": cmd_check_derivation,
    "compile-hilbert": cmd_compile_hilbert,
    "translate": cmd_translate,
    "conformance": cmd_conformance,
}


def run(argv: Sequence[str]) -> int:
    try:
        args = _parser().parse_args(list(argv))
        _validate(args)
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"condikit: usage error: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
