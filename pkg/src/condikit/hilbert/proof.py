"""Hilbert proofs as numbered line lists, and their checker."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from ..formula import Formula, is_diamond_free, parse, to_text
from ..sequent.calculus import LogicId
from .schemas import RULES, SYSTEMS, AxiomId, matches_axiom, rule_conclusion_ok


@dataclass(frozen=True)
class Axiom:
    axiom: AxiomId


@dataclass(frozen=True)
class Rule:
    name: str
    premises: tuple[int, ...]


@dataclass(frozen=True)
class Hypothesis:
    pass


Justification = Union[Axiom, Rule, Hypothesis]


@dataclass(frozen=True)
class Line:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class HilbertProof:
    lines: tuple[Line, ...]

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.lines[-1].formula if self.lines else None

    def __len__(self) -> int:
        return len(self.lines)

    def hypotheses(self) -> list[Formula]:
        return [l.formula for l in self.lines if isinstance(l.just, Hypothesis)]

    def cited(self) -> set[str]:
        """Names of every axiom and rule used."""
        out = set()
        for l in self.lines:
            if isinstance(l.just, Axiom):
                out.add(l.just.axiom.value)
            elif isinstance(l.just, Rule):
                out.add(l.just.name)
        return out

    # ------------------------------------------------------------- formats

    def to_json(self) -> list[dict]:
        out = []
        for l in self.lines:
            j = l.just
            if isinstance(j, Axiom):
                jd = {"axiom": j.axiom.value}
            elif isinstance(j, Rule):
                jd = {"rule": j.name, "premises": list(j.premises)}
            else:
                jd = {"hypothesis": True}
            out.append({"formula": to_text(l.formula), "just": jd})
        return out

    def to_json_lines(self) -> str:
        return "".join(json.dumps(obj, ensure_ascii=False) + "\n" for obj in self.to_json())

    @classmethod
    def from_json(cls, data: Union[str, Iterable[dict]]) -> "HilbertProof":
        """Read a JSON array or JSON lines."""
        if isinstance(data, str):
            text = data.strip()
            if text.startswith("["):
                data = json.loads(text)
            else:
                data = [json.loads(line) for line in text.splitlines() if line.strip()]
        lines = []
        for obj in data:
            j = obj["just"]
            if "axiom" in j:
                just: Justification = Axiom(AxiomId.parse(j["axiom"]))
            elif "rule" in j:
                just = Rule(j["rule"], tuple(int(i) for i in j["premises"]))
            elif j.get("hypothesis"):
                just = Hypothesis()
            else:
                raise ValueError(f"unknown justification {j!r}")
            lines.append(Line(parse(obj["formula"]), just))
        return cls(tuple(lines))

    def render(self) -> str:
        """One line per step: number, formula, and the justification on the right."""
        rows = []
        for i, l in enumerate(self.lines, 1):
            j = l.just
            if isinstance(j, Axiom):
                why = j.axiom.value
            elif isinstance(j, Rule):
                why = ", ".join(str(p + 1) for p in j.premises) + f"; {j.name}"
            else:
                why = "hyp"
            rows.append((f"{i}.", to_text(l.formula), f"({why})"))
        if not rows:
            return ""
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        w2 = max(len(r[2]) for r in rows)
        return "\n".join(f"{a:>{w0}} {b:<{w1}}  {c:>{w2}}" for a, b, c in rows) + "\n"


@dataclass(frozen=True)
class HilbertCheck:
    ok: bool
    line: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_hilbert(
    proof: HilbertProof, logic: LogicId, hypotheses: Iterable[Formula] = ()
) -> HilbertCheck:
    """Check every line of ``proof`` in the axiom system of ``logic``.

    Hypothesis lines are accepted only for formulas in ``hypotheses``.
    On failure the result carries the 0-based index of the first bad line.
    """
    system = SYSTEMS[LogicId(logic)]
    allowed = set(hypotheses)
    for k, line in enumerate(proof.lines):
        f, j = line.formula, line.just
        if not system.diamonds and not is_diamond_free(f):
            return HilbertCheck(False, k, f"{system.name} has no might-conditionals")
        if isinstance(j, Axiom):
            if j.axiom not in system.axioms:
                return HilbertCheck(False, k, f"{j.axiom.value} is not an axiom of {system.name}")
            if not matches_axiom(j.axiom, f):
                return HilbertCheck(False, k, f"not an instance of {j.axiom.value}")
        elif isinstance(j, Rule):
            if j.name not in system.rules or j.name not in RULES:
                return HilbertCheck(False, k, f"{j.name} is not a rule of {system.name}")
            if any(not 0 <= i < k for i in j.premises):
                return HilbertCheck(False, k, "premises must be earlier lines")
            prem = [proof.lines[i].formula for i in j.premises]
            if not rule_conclusion_ok(j.name, prem, f):
                return HilbertCheck(False, k, f"{j.name} does not yield this formula")
        elif isinstance(j, Hypothesis):
            if f not in allowed:
                return HilbertCheck(False, k, "undeclared hypothesis")
        else:
            return HilbertCheck(False, k, "unknown justification")
    if not proof.lines:
        return HilbertCheck(False, None, "empty proof")
    return HilbertCheck(True)
