"""Routing claims to solver or soft verification, and bridging the two."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .claims import Claim, ClaimType, Route, Status, abstraction_var, soft_label
from .errors import FormulaError, InconsistentContext, SolverError
from .logic.ast import BOOL, Atom, NamedAssertion, Not, Origin, Signature, is_quantifier_free
from .logic.instantiate import instantiate_quantifiers
from .logic.smtlib import parse_smtlib_script
from .solver import SolverSession, Verdict

log = logging.getLogger(__name__)

SMT_TYPES = frozenset({ClaimType.MATHEMATICAL, ClaimType.LOGICAL, ClaimType.TEMPORAL})


def route(claim_type: ClaimType) -> Route:
    return Route.SMT if claim_type in SMT_TYPES else Route.SOFT


# -- formal verification ----------------------------------------------------


def verify_smt(claim: Claim, context: Sequence[NamedAssertion], sig: Signature,
               session: SolverSession, timeout_ms: Optional[int] = None) -> Status:
    """Classify a formalized claim against the context with two probes.

    The consistency probe (context plus claim) runs first; unsat means the
    claim is contradictory and its core is kept on the claim. The
    entailment probe (context plus negated claim) runs second; unsat means
    entailed. Both unsat can only happen with an inconsistent context.
    Raises FormulaError or SolverError for the caller's fallback.
    """
    if claim.formalization is None:
        raise FormulaError(f"claim {claim.index} has no formalization")
    phi = claim.formalization
    if not is_quantifier_free(phi):
        phi = instantiate_quantifiers(phi, sig)
        claim.formalization = phi
    positive = NamedAssertion(claim.label, phi, Origin.CLAIM, claim.index)
    negative = NamedAssertion(f"negated_{claim.label}", Not(phi), Origin.CLAIM, claim.index)
    consistency = session.check([*context, positive], sig, timeout_ms)
    entailment = session.check([*context, negative], sig, timeout_ms, want_core=False)
    c, e = consistency.verdict, entailment.verdict
    if c is Verdict.UNSAT and e is Verdict.UNSAT:
        raise InconsistentContext("context is unsatisfiable on its own")
    if c is Verdict.UNSAT:
        claim.core = consistency.core
        return Status.CONTRADICTORY
    if e is Verdict.UNSAT:
        return Status.ENTAILED
    if c is Verdict.SAT:
        return Status.POSSIBLE
    return Status.UNKNOWN


# -- soft verification ------------------------------------------------------


@dataclass(frozen=True)
class JudgeVote:
    verdict: Status
    confidence: float

    def __post_init__(self):
        if self.verdict not in (Status.SUPPORTED, Status.PLAUSIBLE, Status.UNSUPPORTED, Status.UNCERTAIN):
            raise ValueError(f"{self.verdict} is not a judge verdict")


# ties go to the more cautious verdict
CONSERVATISM = (Status.UNCERTAIN, Status.UNSUPPORTED, Status.PLAUSIBLE, Status.SUPPORTED)
_TIE_TOL = 1e-12


def verify_soft(votes: Sequence[JudgeVote]) -> tuple[Status, float]:
    """Confidence-weighted vote over judge verdicts.

    Returns the winning verdict and its share of the total weight. No
    votes, or zero total weight, yields ``(UNCERTAIN, 0.0)``.
    """
    weight = {s: 0.0 for s in CONSERVATISM}
    for v in votes:
        weight[v.verdict] += max(0.0, min(1.0, v.confidence))
    total = sum(weight.values())
    if total <= 0:
        return Status.UNCERTAIN, 0.0
    top = max(weight.values())
    winner = next(s for s in CONSERVATISM if weight[s] >= top - _TIE_TOL)
    return winner, weight[winner] / total


def boolean_abstraction(claim: Claim, sig: Signature) -> tuple[Signature, Optional[NamedAssertion]]:
    """Fresh Boolean stand-in for a soft claim the judges accepted."""
    if claim.status not in (Status.SUPPORTED, Status.PLAUSIBLE):
        return sig, None
    name = abstraction_var(claim.index)
    sig = sig.with_constant(name, BOOL)
    claim.abstraction = name
    return sig, NamedAssertion(soft_label(claim.index), Atom(name), Origin.ABSTRACTION, claim.index)


@dataclass(frozen=True)
class BridgingAxiom:
    smt: str
    provenance: str = ""


def inject_bridging_axioms(
    axioms: Sequence[BridgingAxiom], sig: Signature, start: int = 0,
) -> tuple[list[NamedAssertion], Signature, list[str]]:
    """Parse bridging axioms; malformed ones are dropped with an alert.

    Axioms may only use symbols already in ``sig`` (strict parsing), so
    they can tie abstraction variables to formal vocabulary but never
    invent new symbols.
    """
    out: list[NamedAssertion] = []
    alerts: list[str] = []
    for i, ax in enumerate(axioms, start):
        try:
            script = parse_smtlib_script(ax.smt, sig, lenient=False)
            if not script.assertions:
                raise FormulaError("no assertion found")
            phi = script.conjunction()
            if not is_quantifier_free(phi):
                phi = instantiate_quantifiers(phi, script.signature)
            sig = script.signature
        except FormulaError as exc:
            alerts.append(f"dropped bridging axiom {i} ({exc})")
            continue
        out.append(NamedAssertion(f"bridge_{i}", phi, Origin.BRIDGING_AXIOM))
    return out, sig, alerts


# -- orchestration ----------------------------------------------------------

JudgeFn = Callable[[Claim], Sequence[JudgeVote]]


def verify_claim(
    claim: Claim,
    context: Sequence[NamedAssertion],
    sig: Signature,
    session: SolverSession,
    judge: Optional[JudgeFn],
    timeout_ms: Optional[int] = None,
    hybrid_on_unknown: bool = True,
) -> Status:
    """Verify one claim, falling back to soft verification when needed.

    SMT-routed claims with a formalization go to the solver. A missing or
    broken formalization, a solver failure, or (optionally) an ``unknown``
    verdict re-verifies the claim softly and records why on the claim.
    """
    if route(claim.type) is Route.SMT and claim.fallback is None:
        try:
            if claim.formalization is None:
                raise FormulaError("no formalization available")
            status = verify_smt(claim, context, sig, session, timeout_ms)
            if status is not Status.UNKNOWN or not hybrid_on_unknown:
                claim.verify_route = Route.SMT
                claim.status = status
                return status
            claim.fallback = "solver returned unknown"
        except InconsistentContext:
            raise
        except (FormulaError, SolverError) as exc:
            claim.fallback = f"{type(exc).__name__}: {exc}"
        log.info("claim %d falls back to soft verification: %s", claim.index, claim.fallback)
    votes = judge(claim) if judge else ()
    status, confidence = verify_soft(votes)
    claim.verify_route = Route.SOFT
    claim.status = status
    if votes:
        claim.notes.append(f"judge agreement {confidence:.3f}")
    return status
