"""Claim records and the vocabulary of types, routes and statuses."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .logic.ast import Atom, Formula, NamedAssertion, Origin

DEFAULT_CLAIM_CONFIDENCE = 0.9


class ClaimType(enum.Enum):
    MATHEMATICAL = "M"
    LOGICAL = "L"
    TEMPORAL = "T"
    PROBABILISTIC = "P"
    COMMONSENSE = "C"
    VAGUE = "V"


class Route(enum.Enum):
    SMT = "smt"
    SOFT = "soft"


class Status(enum.Enum):
    ENTAILED = "entailed"
    CONTRADICTORY = "contradictory"
    POSSIBLE = "possible"
    UNKNOWN = "unknown"
    SUPPORTED = "supported"
    PLAUSIBLE = "plausible"
    UNSUPPORTED = "unsupported"
    UNCERTAIN = "uncertain"


SMT_STATUSES = (Status.ENTAILED, Status.CONTRADICTORY, Status.POSSIBLE, Status.UNKNOWN)
SOFT_STATUSES = (Status.SUPPORTED, Status.PLAUSIBLE, Status.UNSUPPORTED, Status.UNCERTAIN)
# statuses whose claims take part in the joint consistency check
JOINT_STATUSES = (Status.ENTAILED, Status.POSSIBLE, Status.SUPPORTED, Status.PLAUSIBLE)


def claim_label(index: int) -> str:
    return f"claim_{index}"


def soft_label(index: int) -> str:
    return f"soft_{index}"


def abstraction_var(index: int) -> str:
    return f"b_{index}"


@dataclass
class Claim:
    index: int
    text: str
    type: ClaimType
    confidence: float = DEFAULT_CLAIM_CONFIDENCE
    status: Optional[Status] = None
    formalization: Optional[Formula] = None
    abstraction: Optional[str] = None
    core: tuple[str, ...] = ()
    verify_route: Optional[Route] = None
    fallback: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    @property
    def label(self) -> str:
        return claim_label(self.index)

    def assertion(self) -> Optional[NamedAssertion]:
        """What this claim contributes to a joint check, if anything."""
        if self.status not in JOINT_STATUSES:
            return None
        if self.status in (Status.ENTAILED, Status.POSSIBLE) and self.formalization is not None:
            return NamedAssertion(self.label, self.formalization, Origin.CLAIM, self.index)
        if self.abstraction is not None:
            return NamedAssertion(soft_label(self.index), Atom(self.abstraction), Origin.ABSTRACTION, self.index)
        return None
