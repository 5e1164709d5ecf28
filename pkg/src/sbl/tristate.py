"""Three-valued answers for budget-bounded predicates.

``YES`` and ``NO`` always carry a certificate (a replayable reduction
script, or the name and value of a separating invariant); ``UNKNOWN``
never does.  Exceeding a search budget yields ``UNKNOWN`` rather than a
wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

YES = "yes"
NO = "no"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class TriState:
    value: str
    certificate: Optional[Any] = None

    def __post_init__(self):
        if self.value not in (YES, NO, UNKNOWN):
            raise ValueError(f"bad tri-state {self.value!r}")
        if self.value == UNKNOWN and self.certificate is not None:
            raise ValueError("unknown answers carry no certificate")
        if self.value != UNKNOWN and self.certificate is None:
            raise ValueError(f"{self.value} answers need a certificate")

    def __bool__(self) -> bool:
        return self.value == YES

    @staticmethod
    def yes(certificate: Any) -> "TriState":
        return TriState(YES, certificate)

    @staticmethod
    def no(certificate: Any) -> "TriState":
        return TriState(NO, certificate)

    @staticmethod
    def unknown() -> "TriState":
        return TriState(UNKNOWN, None)


def tri_and(*answers: TriState) -> TriState:
    """Conjunction: NO dominates, then UNKNOWN, then YES."""
    for a in answers:
        if a.value == NO:
            return a
    for a in answers:
        if a.value == UNKNOWN:
            return a
    return TriState(YES, [a.certificate for a in answers])


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 12
    max_crossings: int = 4
    max_states: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if min(self.max_depth, self.max_crossings, self.max_states) < 0:
            raise ValueError("budget fields must be nonnegative")
