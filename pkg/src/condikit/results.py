"""Search budgets and verdicts shared by the flat and nested provers."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class SearchBudget:
    depth: int = 40
    nodes: int = 200_000

    def __post_init__(self) -> None:
        if self.depth < 1 or self.nodes < 1:
            raise ValueError("budget limits must be positive")


class Status(enum.Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class ProofResult:
    status: Status
    derivation: Any = None
    nodes: int = 0

    @property
    def proved(self) -> bool:
        return self.status is Status.PROVED

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def conclusive(self) -> bool:
        return self.status is not Status.BUDGET_EXHAUSTED


class BudgetExceeded(Exception):
    """Raised inside a search when the node budget runs out."""
