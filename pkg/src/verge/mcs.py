"""Minimal correction sets over claims, and the feedback built from them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .claims import Claim
from .errors import InconsistentContext, LimitExceeded
from .logic.ast import NamedAssertion, Signature
from .solver import SolverSession, Verdict

DEFAULT_EXACT_LIMIT = 12


@dataclass(frozen=True)
class CorrectionResult:
    """``mss`` holds claims kept, ``mcs`` claims to revise (both by index)."""

    mss: tuple[int, ...]
    mcs: tuple[int, ...]
    sat_calls: int
    order: tuple[int, ...] = ()
    uncertain: tuple[int, ...] = ()


def _assertions(claims: Sequence[Claim]) -> dict[int, NamedAssertion]:
    out = {}
    for c in claims:
        a = c.assertion()
        if a is None:
            raise ValueError(f"claim {c.index} has nothing to assert (status {c.status})")
        out[c.index] = a
    return out


def greedy_order(claims: Sequence[Claim]) -> list[Claim]:
    return sorted(claims, key=lambda c: (-c.confidence, c.index))


def greedy_mcs(
    context: Sequence[NamedAssertion],
    claims: Sequence[Claim],
    sig: Signature,
    session: SolverSession,
    timeout_ms: Optional[int] = None,
    check_context: bool = False,
) -> CorrectionResult:
    """Grow a satisfiable subset greedily, most confident claims first.

    Exactly one solver call is spent per claim: a claim stays when it is
    consistent with the context and everything kept so far. An
    ``unknown`` answer sends the claim to the correction set, flagged as
    uncertain. ``check_context`` adds one uncounted upfront probe.
    """
    asserted = _assertions(claims)
    if check_context:
        if session.check(list(context), sig, timeout_ms, want_core=False).verdict is Verdict.UNSAT:
            raise InconsistentContext("context is unsatisfiable before any claim is added")
    order = greedy_order(claims)
    kept: list[int] = []
    removed: list[int] = []
    uncertain: list[int] = []
    calls = 0
    for c in order:
        trial = [*context, *(asserted[i] for i in kept), asserted[c.index]]
        calls += 1
        verdict = session.check(trial, sig, timeout_ms, want_core=False).verdict
        if verdict is Verdict.SAT:
            kept.append(c.index)
        else:
            removed.append(c.index)
            if verdict is Verdict.UNKNOWN:
                uncertain.append(c.index)
    return CorrectionResult(tuple(sorted(kept)), tuple(sorted(removed)), calls,
                            tuple(c.index for c in order), tuple(sorted(uncertain)))


def exact_min_mcs(
    context: Sequence[NamedAssertion],
    claims: Sequence[Claim],
    sig: Signature,
    session: SolverSession,
    limit: int = DEFAULT_EXACT_LIMIT,
    timeout_ms: Optional[int] = None,
) -> CorrectionResult:
    """Smallest correction set, by enumerating removals in size order.

    Candidate removals are tried by ascending size and, within a size, in
    lexicographic order of claim indices; the first one restoring
    satisfiability is returned. ``unknown`` answers never count as a fix.
    """
    if len(claims) > limit:
        raise LimitExceeded(f"{len(claims)} claims exceeds the exact search limit of {limit}")
    asserted = _assertions(claims)
    indices = sorted(asserted)
    calls = 0
    for size in range(len(indices) + 1):
        for removal in itertools.combinations(indices, size):
            keep = [i for i in indices if i not in removal]
            calls += 1
            res = session.check([*context, *(asserted[i] for i in keep)], sig, timeout_ms, want_core=False)
            if res.verdict is Verdict.SAT:
                return CorrectionResult(tuple(keep), tuple(removal), calls, tuple(indices))
    raise InconsistentContext("no subset of the claims is consistent with the context")


# -- feedback ---------------------------------------------------------------


@dataclass(frozen=True)
class FeedbackItem:
    claim_index: int
    claim_text: str
    core_labels: tuple[str, ...]
    directive: str
    uncertain: bool = False


def format_feedback(result: CorrectionResult, core: Sequence[str],
                    claims: Sequence[Claim]) -> list[FeedbackItem]:
    """One revision item per claim in the correction set."""
    by_index = {c.index: c for c in claims}
    items = []
    for i in result.mcs:
        c = by_index[i]
        if i in result.uncertain:
            directive = (f"The solver could not decide whether claim {i} fits with the rest of the "
                         f"answer. Re-derive \"{c.text}\" and state it precisely.")
        else:
            directive = (f"Revise or retract claim {i} (\"{c.text}\"): it cannot hold together "
                         f"with the context and the claims that were kept.")
        items.append(FeedbackItem(i, c.text, tuple(core), directive, i in result.uncertain))
    return items


REFINEMENT_TEMPLATE = """\
The verifier rejected your previous answer.

Status: UNSATISFIABLE

Conflicting assertions: [Z3_UNSAT_CORE]

What to change: [MCS_DESCRIPTION]

Write a corrected answer. Keep every claim that was not flagged, and make
sure the revised claims are consistent with the context."""


def render_refinement(items: Sequence[FeedbackItem], core: Sequence[str]) -> str:
    """Fill the refinement prompt's core and correction-set slots."""
    description = "\n".join(f"- {it.directive}" for it in items) or "- (none)"
    return (REFINEMENT_TEMPLATE
            .replace("[Z3_UNSAT_CORE]", "[" + ", ".join(core) + "]")
            .replace("[MCS_DESCRIPTION]", description))


__all__ = [
    "CorrectionResult",
    "FeedbackItem",
    "exact_min_mcs",
    "format_feedback",
    "greedy_mcs",
    "greedy_order",
    "render_refinement",
]
