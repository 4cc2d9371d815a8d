"""Solver-decided equivalence of formalizations and clique-based consensus."""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import FormulaError, SolverError
from .logic.ast import Formula, Iff, Implies, NamedAssertion, Not, Signature, is_quantifier_free
from .logic.instantiate import instantiate_quantifiers
from .logic.smtlib import render_formula
from .solver import SolverSession, Verdict

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.70
DEFAULT_SIMILARITY_WEIGHT = 0.3


class Decision(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def _ground(f: Formula, sig: Signature) -> Formula:
    return f if is_quantifier_free(f) else instantiate_quantifiers(f, sig)


def _valid(f: Formula, sig: Signature, session: SolverSession, timeout_ms: Optional[int]) -> Decision:
    """YES when ``f`` holds in every model, i.e. its negation is unsat."""
    try:
        probe = NamedAssertion("negated_goal", Not(_ground(f, sig)))
        res = session.check([probe], sig, timeout_ms, want_core=False)
    except SolverError as exc:
        log.warning("equivalence probe failed: %s", exc)
        return Decision.UNKNOWN
    return {Verdict.UNSAT: Decision.YES, Verdict.SAT: Decision.NO}.get(res.verdict, Decision.UNKNOWN)


def equivalent(a: Formula, b: Formula, sig: Signature, session: SolverSession,
               timeout_ms: Optional[int] = None) -> Decision:
    """Decide whether ``a`` and ``b`` agree in every model of ``sig``."""
    return _valid(Iff(_ground(a, sig), _ground(b, sig)), sig, session, timeout_ms)


def check_strengthening(new: Formula, old: Formula, sig: Signature, session: SolverSession,
                        timeout_ms: Optional[int] = None) -> Decision:
    """YES when ``new`` entails ``old`` (``new`` and not ``old`` is unsat)."""
    return _valid(Implies(_ground(new, sig), _ground(old, sig)), sig, session, timeout_ms)


# -- consensus --------------------------------------------------------------


@dataclass(frozen=True)
class CandidateSet:
    """Up to ``k`` formalizations sampled for one claim (failed parses dropped)."""

    candidates: tuple[Formula, ...]
    k: int

    def __post_init__(self):
        if self.k < 1 or len(self.candidates) > self.k:
            raise ValueError("need 1 <= len(candidates) <= k")


class ConsensusStatus(enum.Enum):
    ACCEPTED = "accepted"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class ConsensusResult:
    status: ConsensusStatus
    representative: Optional[Formula]
    clique: tuple[int, ...]
    k: int
    confidence: float
    similarity: Optional[float] = None
    threshold: float = DEFAULT_THRESHOLD

    @property
    def clique_size(self) -> int:
        return len(self.clique)

    @property
    def accepted(self) -> bool:
        return self.status is ConsensusStatus.ACCEPTED

    @property
    def low_confidence(self) -> bool:
        return self.confidence < self.threshold


def majority(k: int) -> int:
    return math.ceil(k / 2)


def max_clique(n: int, edge: Callable[[int, int], bool]) -> list[tuple[int, ...]]:
    """All maximum cliques of a graph on ``range(n)``, by brute force."""
    for size in range(n, 0, -1):
        found = [
            c for c in itertools.combinations(range(n), size)
            if all(edge(i, j) for i, j in itertools.combinations(c, 2))
        ]
        if found:
            return found
    return []


def combine_confidence(clique_size: int, k: int, similarity: Optional[float],
                       weight: float = DEFAULT_SIMILARITY_WEIGHT) -> float:
    share = clique_size / k
    if similarity is None:
        return share
    return (1 - weight) * share + weight * similarity


def consensus(
    cands: CandidateSet,
    sig: Signature,
    session: SolverSession,
    threshold: float = DEFAULT_THRESHOLD,
    similarity_fn: Optional[Callable[[Formula], Optional[float]]] = None,
    similarity_weight: float = DEFAULT_SIMILARITY_WEIGHT,
    timeout_ms: Optional[int] = None,
) -> ConsensusResult:
    """Pick the formalization most of the samples agree on.

    Candidates are vertices; two are joined when the solver proves them
    equivalent (``unknown`` counts as no edge). The largest clique wins
    and its lexicographically smallest rendering is the representative.
    A clique reaching a majority of ``k`` is accepted; a confidence under
    ``threshold`` leaves it accepted but flagged ``low_confidence``.
    """
    forms = list(cands.candidates)
    if not forms:
        return ConsensusResult(ConsensusStatus.AMBIGUOUS, None, (), cands.k, 0.0, None, threshold)
    rendered = [render_formula(f) for f in forms]
    memo: dict[tuple[int, int], bool] = {}

    def edge(i: int, j: int) -> bool:
        if (i, j) not in memo:
            if rendered[i] == rendered[j]:
                memo[i, j] = True
            else:
                try:
                    memo[i, j] = equivalent(forms[i], forms[j], sig, session, timeout_ms) is Decision.YES
                except FormulaError:
                    memo[i, j] = False
        return memo[i, j]

    cliques = max_clique(len(forms), edge)
    best = min(cliques, key=lambda c: min(rendered[i] for i in c))
    rep_index = min(best, key=lambda i: rendered[i])
    rep = forms[rep_index]
    similarity = similarity_fn(rep) if similarity_fn else None
    confidence = combine_confidence(len(best), cands.k, similarity, similarity_weight)
    status = ConsensusStatus.ACCEPTED if len(best) >= majority(cands.k) else ConsensusStatus.AMBIGUOUS
    return ConsensusResult(status, rep, tuple(best), cands.k, confidence, similarity, threshold)


def round_trip_similarity(formula: Formula, claim_text: str, gateway) -> Optional[float]:
    """Verbalize ``formula`` and score the text against the original claim.

    Returns None when the gateway is unreachable, so callers fall back to
    the clique share alone.
    """
    from .errors import GatewayUnavailable
    from .gateway.parsing import parse_similarity

    try:
        text = gateway.ask("verbalize", FORMULA=render_formula(formula))
        return parse_similarity(gateway.ask("similarity", TEXT_A=claim_text, TEXT_B=text.strip()))
    except GatewayUnavailable as exc:
        log.warning("round-trip similarity unavailable: %s", exc)
        return None
