"""Iterative answer refinement driven by verification feedback.

One run formalizes the problem context once, then alternates between
asking the model for an answer and verifying it: claims are extracted,
routed, checked individually and jointly, scored, and turned into
feedback for the next attempt. Every iteration is appended to a JSONL
trace as soon as it finishes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO

from .cascade import JudgeVote, inject_bridging_axioms, boolean_abstraction, route, verify_claim
from .claims import Claim, Route, Status
from .config import Config
from .equivalence import CandidateSet, ConsensusResult, consensus, round_trip_similarity
from .errors import (
    ContextIrreparable,
    EmptyAnswer,
    FormulaError,
    GatewayError,
    InconsistentContext,
    MalformedOutput,
)
from .gateway.base import Gateway
from .gateway.parsing import (
    DecomposedClaim,
    claim_type_from_label,
    parse_bridging,
    parse_classification,
    parse_decomposition,
    parse_entities,
    parse_formalization,
    parse_judge,
)
from .logic.ast import NamedAssertion, Origin, Signature, is_quantifier_free
from .logic.instantiate import instantiate_quantifiers
from .logic.smtlib import parse_smtlib_script, render_declarations, render_formula
from .mcs import CorrectionResult, FeedbackItem, format_feedback, greedy_mcs, render_refinement
from .problem import Problem
from .scoring import AnswerScore, aggregate, status_score
from .solver import SessionPool, Verdict

log = logging.getLogger(__name__)

WEAK_SCORE = 0.7
FORMAT_REMINDER = ("Your previous reply could not be read. Reply with a non-empty JSON list of "
                   "objects with \"text\" and \"type\" fields and nothing else.")


# -- records ----------------------------------------------------------------


@dataclass
class Feedback:
    """Everything the next generation step is told about this answer."""

    individual: list[dict] = field(default_factory=list)
    joint: list[FeedbackItem] = field(default_factory=list)
    core: tuple[str, ...] = ()
    weak: list[dict] = field(default_factory=list)
    alerts: list[str] = field(default_factory=list)
    summary: Optional[str] = None

    def is_empty(self) -> bool:
        return not (self.individual or self.joint or self.weak or self.alerts or self.summary)

    def render(self) -> str:
        parts = []
        if self.joint:
            parts.append(render_refinement(self.joint, self.core))
        if self.individual:
            parts.append("Claims that failed verification on their own:")
            for it in self.individual:
                line = f"- claim {it['index']} ({it['status']}): {it['text']}"
                if it.get("core"):
                    line += f" [conflicts with: {', '.join(it['core'])}]"
                parts.append(line)
        if self.weak:
            parts.append("Claims that could be stated more firmly or justified better:")
            parts += [f"- claim {w['index']} (score {w['score']:.2f}): {w['text']}" for w in self.weak]
        if self.alerts:
            parts.append("Formalization notes:")
            parts += [f"- {a}" for a in self.alerts]
        if self.summary:
            parts.append(self.summary)
        return "\n".join(parts)

    def to_json(self) -> dict:
        return {
            "individual": self.individual,
            "joint": [
                {"claim": j.claim_index, "text": j.claim_text, "core": list(j.core_labels),
                 "directive": j.directive, "uncertain": j.uncertain}
                for j in self.joint
            ],
            "core": list(self.core),
            "weak": self.weak,
            "alerts": self.alerts,
            "summary": self.summary,
        }


@dataclass
class IterationRecord:
    t: int
    answer: str
    claims: list[Claim]
    joint_sat: bool
    joint_core: tuple[str, ...]
    correction: Optional[CorrectionResult]
    score: AnswerScore
    feedback: Optional[Feedback]
    alerts: list[str] = field(default_factory=list)
    bridging: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.score.accepted

    def to_json(self) -> dict:
        return {
            "record": "iteration",
            "t": self.t,
            "answer": self.answer,
            "claims": [_claim_json(c) for c in self.claims],
            "bridging": self.bridging,
            "joint_sat": self.joint_sat,
            "joint_core": list(self.joint_core),
            "correction": None if self.correction is None else {
                "mss": list(self.correction.mss), "mcs": list(self.correction.mcs),
                "sat_calls": self.correction.sat_calls, "uncertain": list(self.correction.uncertain),
            },
            "score": {
                "per_claim": list(self.score.per_claim), "mean": self.score.mean, "std": self.score.std,
                "penalty": self.score.penalty, "final": self.score.final,
            },
            "accepted": self.accepted,
            "alerts": self.alerts,
            "feedback": None if self.feedback is None else self.feedback.to_json(),
        }


def _claim_json(c: Claim) -> dict:
    return {
        "index": c.index,
        "text": c.text,
        "type": c.type.name,
        "route": route(c.type).value,
        "verified_by": c.verify_route.value if c.verify_route else None,
        "status": c.status.value if c.status else None,
        "confidence": c.confidence,
        "formalization": render_formula(c.formalization) if c.formalization is not None else None,
        "abstraction": c.abstraction,
        "core": list(c.core),
        "fallback": c.fallback,
        "notes": c.notes,
    }


@dataclass
class ContextState:
    signature: Signature
    assertions: list[NamedAssertion]
    degraded: bool = False
    repair_rounds: int = 0
    alerts: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "record": "setup",
            "signature": self.signature.to_json(),
            "context": [{"label": a.label, "smt": render_formula(a.formula)} for a in self.assertions],
            "degraded": self.degraded,
            "repair_rounds": self.repair_rounds,
            "alerts": self.alerts,
        }


TERMINAL_REASONS = ("accepted", "converged", "budget-exhausted")


@dataclass
class Trajectory:
    problem_id: str
    context: ContextState
    iterations: list[IterationRecord]
    answer: Optional[str]
    reason: str
    best_answer: Optional[str]
    best_score: float
    best_iteration: Optional[int]

    @property
    def accepted(self) -> bool:
        return self.reason == "accepted"


# -- the loop ---------------------------------------------------------------


class Refiner:
    """Runs the generate, verify and refine cycle for one problem at a time."""

    def __init__(self, gateway: Optional[Gateway], pool: SessionPool, config: Optional[Config] = None):
        self.gateway = gateway
        self.pool = pool
        self.config = config or Config()
        self.p = self.config.pipeline
        self.timeout_ms = self.config.solver.timeout_ms

    # setup

    def _ask(self, stage: str, **slots) -> str:
        if self.gateway is None:
            raise GatewayError(f"stage {stage} needs a gateway but none is configured")
        return self.gateway.ask(stage, **slots)

    def extract_signature(self, problem: Problem) -> Signature:
        if problem.signature is not None:
            return Signature.from_json(problem.signature)
        return parse_entities(self._ask("entity-extract", CONTEXT=problem.context_text(), QUERY=problem.query))

    def _formalize_premise(self, problem: Problem, n: int, sig: Signature, sample: str):
        premise = problem.context[n]
        if premise.smt is not None and sample == "context":
            text = premise.smt
        else:
            text = parse_formalization(self._ask(
                "formalize", CONTEXT=problem.context_text(), SIGNATURE=_sig_text(sig),
                CLAIM=premise.text, SAMPLE=sample,
            ))
        script = parse_smtlib_script(text, sig, lenient=True)
        if not script.assertions:
            raise FormulaError("formalization asserts nothing")
        phi = script.conjunction()
        if not is_quantifier_free(phi):
            phi = instantiate_quantifiers(phi, script.signature)
        return NamedAssertion(problem.premise_label(n), phi, Origin.CONTEXT_AXIOM), script.signature

    def formalize_context(self, problem: Problem, sig: Signature) -> ContextState:
        """Formalize every premise, then repair the set until it is satisfiable.

        Each repair round finds premises that break satisfiability (kept in
        premise order, greedily) and asks for fresh formalizations of just
        those. If the context is still unsatisfiable after the last round,
        ContextIrreparable carries the largest consistent subset found.
        """
        alerts: list[str] = []
        slots: list[Optional[NamedAssertion]] = []
        for n in range(len(problem.context)):
            try:
                a, sig = self._formalize_premise(problem, n, sig, "context")
                slots.append(a)
            except (FormulaError, MalformedOutput) as exc:
                alerts.append(f"premise {problem.premise_label(n)} could not be formalized ({exc})")
                slots.append(None)
        rounds = 0
        while True:
            current = [a for a in slots if a is not None]
            kept, offenders = self._greedy_premises(current, sig)
            if not offenders:
                return ContextState(sig, current, False, rounds, alerts)
            if rounds >= self.p.repair_rounds:
                alerts.append("context stayed unsatisfiable; offending premises: "
                              + ", ".join(a.label for a in offenders))
                raise ContextIrreparable(ContextState(sig, kept, True, rounds, alerts))
            rounds += 1
            alerts.append(f"repair round {rounds}: re-formalizing " + ", ".join(a.label for a in offenders))
            for a in offenders:
                n = next(i for i, s in enumerate(slots) if s is a)
                try:
                    slots[n], sig = self._formalize_premise(problem, n, sig, f"repair-{rounds}")
                except (FormulaError, MalformedOutput) as exc:
                    alerts.append(f"repair of {a.label} failed ({exc})")

    def _greedy_premises(self, premises: list[NamedAssertion], sig: Signature):
        with self.pool.lease() as s:
            if s.check(premises, sig, self.timeout_ms, want_core=False).verdict is not Verdict.UNSAT:
                return premises, []
            kept: list[NamedAssertion] = []
            bad: list[NamedAssertion] = []
            for a in premises:
                res = s.check([*kept, a], sig, self.timeout_ms, want_core=False)
                (kept if res.verdict is Verdict.SAT else bad).append(a)
        return kept, bad

    def setup(self, problem: Problem) -> ContextState:
        sig = self.extract_signature(problem)
        try:
            return self.formalize_context(problem, sig)
        except ContextIrreparable as exc:
            state = exc.args[0]
            log.warning("context irreparable; SMT claims will be verified softly")
            return state

    # claims

    def decompose(self, answer: str) -> tuple[list[DecomposedClaim], list[str]]:
        alerts = []
        for reminder in ("", FORMAT_REMINDER):
            try:
                items = parse_decomposition(self._ask("decompose", ANSWER=answer, FORMAT_REMINDER=reminder))
                if items:
                    return items, alerts
                alerts.append("decomposition returned no claims")
            except MalformedOutput as exc:
                alerts.append(f"decomposition unreadable ({exc})")
        return [], alerts

    def _claims(self, items: Sequence[DecomposedClaim]) -> list[Claim]:
        out = []
        for i, item in enumerate(items):
            kind, conf = item.type, item.confidence
            if kind is None:
                kind, cconf = parse_classification(self._ask("classify", CLAIM=item.text))
                conf = conf if conf is not None else cconf
            out.append(Claim(i, item.text, kind, self.p.default_confidence if conf is None else conf))
        return out

    def _judge(self, problem: Problem) -> Callable[[Claim], list[JudgeVote]]:
        def judge(claim: Claim) -> list[JudgeVote]:
            if self.gateway is None:
                return []
            return [
                parse_judge(self._ask("judge", CONTEXT=problem.context_text(), CLAIM=claim.text, JUDGE_ID=str(j)))
                for j in range(self.p.judges)
            ]
        return judge

    def formalize_claim(self, problem: Problem, claim: Claim, ctx: ContextState) -> tuple[Signature, Optional[ConsensusResult]]:
        """Sample k formalizations and keep the consensus one on the claim."""
        sig = ctx.signature
        forms = []
        sigs = []
        for k in range(self.p.k):
            try:
                text = parse_formalization(self._ask(
                    "formalize", CONTEXT=problem.context_text(), SIGNATURE=_sig_text(sig),
                    CLAIM=claim.text, SAMPLE=str(k),
                ))
                script = parse_smtlib_script(text, sig, lenient=True)
                if not script.assertions:
                    raise FormulaError("formalization asserts nothing")
                merged = sig.merge(script.signature)
                for other in sigs:
                    merged = merged.merge(other)
            except (FormulaError, MalformedOutput) as exc:
                claim.notes.append(f"sample {k} discarded ({exc})")
                continue
            forms.append(script.conjunction())
            sigs.append(script.signature)
        if not forms:
            claim.fallback = "no usable formalization"
            return sig, None
        for other in sigs:
            sig = sig.merge(other)
        sim = None
        if self.p.round_trip and self.gateway is not None:
            sim = lambda f: round_trip_similarity(f, claim.text, self.gateway)  # noqa: E731
        with self.pool.lease() as s:
            result = consensus(CandidateSet(tuple(forms), self.p.k), sig, s, self.p.consensus_threshold,
                               sim, self.p.similarity_weight, self.timeout_ms)
        if not result.accepted:
            claim.fallback = f"ambiguous formalization (agreement {result.clique_size}/{result.k})"
            return sig, result
        claim.formalization = result.representative
        return sig, result

    def _verify_one(self, problem: Problem, claim: Claim, ctx: ContextState, given: Optional[str]):
        alerts: list[str] = []
        sig = ctx.signature
        if route(claim.type) is Route.SMT:
            if ctx.degraded:
                claim.fallback = "context could not be repaired"
            elif given is not None:
                try:
                    script = parse_smtlib_script(given, sig, lenient=True)
                    sig = script.signature
                    claim.formalization = script.conjunction()
                except FormulaError as exc:
                    claim.fallback = f"supplied formalization rejected ({exc})"
            else:
                sig, result = self.formalize_claim(problem, claim, ctx)
                if result is not None and result.accepted and result.low_confidence:
                    alerts.append(f"claim {claim.index}: low formalization confidence {result.confidence:.2f}")
        try:
            with self.pool.lease() as s:
                verify_claim(claim, ctx.assertions, sig, s, self._judge(problem), self.timeout_ms,
                             self.p.hybrid_on_unknown)
        except InconsistentContext:
            claim.status = Status.UNKNOWN
            alerts.append(f"claim {claim.index}: context found inconsistent during verification")
        if claim.fallback:
            alerts.append(f"claim {claim.index} verified softly: {claim.fallback}")
        return sig, alerts

    # one verification pass

    def verify_answer(self, problem: Problem, ctx: ContextState, t: int, answer: str,
                      claims: list[Claim], given: Optional[list[Optional[str]]] = None,
                      alerts: Optional[list[str]] = None) -> IterationRecord:
        alerts = list(alerts or [])
        given = given or [None] * len(claims)
        jobs = max(1, self.p.jobs)
        if jobs > 1 and len(claims) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(lambda cg: self._verify_one(problem, cg[0], ctx, cg[1]), zip(claims, given)))
        else:
            results = [self._verify_one(problem, c, ctx, g) for c, g in zip(claims, given)]

        sig = ctx.signature
        for c, (csig, calerts) in zip(claims, results):
            alerts += calerts
            try:
                sig = sig.merge(csig)
            except FormulaError as exc:
                alerts.append(f"claim {c.index} left out of the joint check ({exc})")
                c.formalization = None
                c.notes.append("vocabulary clash with another claim")

        abstractions = []
        for c in claims:
            if c.verify_route is Route.SOFT:
                sig, a = boolean_abstraction(c, sig)
                if a is not None:
                    abstractions.append(c)
        bridges: list[NamedAssertion] = []
        if abstractions and self.p.bridging and self.gateway is not None:
            listing = "\n".join(f"{c.abstraction}: {c.text}" for c in abstractions)
            try:
                axioms = parse_bridging(self._ask(
                    "bridging-axioms", CONTEXT=problem.context_text(), SIGNATURE=_sig_text(sig),
                    SOFT_CLAIMS=listing,
                ))
                bridges, sig, dropped = inject_bridging_axioms(axioms, sig)
                alerts += dropped
            except MalformedOutput as exc:
                alerts.append(f"bridging axioms unreadable ({exc})")

        members = [c for c in claims if c.assertion() is not None]
        hard = [*ctx.assertions, *bridges]
        with self.pool.lease() as s:
            joint = s.check([*hard, *(c.assertion() for c in members)], sig, self.timeout_ms)
        joint_sat = joint.verdict is Verdict.SAT
        if joint.verdict is Verdict.UNKNOWN:
            alerts.append("joint consistency check returned unknown")

        scores = [status_score(c.status) for c in claims]
        try:
            score = aggregate(scores, joint_sat, self.p.tau_acc)
        except EmptyAnswer:
            score = AnswerScore((), 0.0, 0.0, 1.0, 0.0, joint_sat, False)
            alerts.append("answer produced no checkable claims")

        correction = None
        feedback = None
        if not score.accepted:
            feedback = Feedback(alerts=list(alerts))
            for c in claims:
                if c.status not in (Status.ENTAILED, Status.POSSIBLE, Status.SUPPORTED, Status.PLAUSIBLE):
                    feedback.individual.append({"index": c.index, "text": c.text, "status": c.status.value,
                                                "core": list(c.core)})
            if joint.verdict is Verdict.UNSAT:
                with self.pool.lease() as s:
                    correction = greedy_mcs(hard, members, sig, s, self.timeout_ms)
                feedback.joint = format_feedback(correction, joint.core, members)
                feedback.core = joint.core
            else:
                weak = sorted((c for c in members if status_score(c.status) <= WEAK_SCORE),
                              key=lambda c: (status_score(c.status), c.index))
                feedback.weak = [{"index": c.index, "text": c.text, "score": status_score(c.status)}
                                 for c in weak]
            if feedback.is_empty():
                feedback.summary = (f"The answer scored {score.final:.3f}, below the acceptance "
                                    f"threshold {self.p.tau_acc:.2f}. Strengthen the justification.")
        return IterationRecord(t, answer, claims, joint_sat, joint.core, correction, score, feedback,
                               alerts, [render_formula(b.formula) for b in bridges])

    # full run

    def run(self, problem: Problem, trace: Optional[TextIO] = None) -> Trajectory:
        ctx = self.setup(problem)
        _emit(trace, {"problem": problem.id, **ctx.to_json()})
        iterations: list[IterationRecord] = []
        best_score, best_answer, best_t = 0.0, None, None
        previous, feedback_text = "", ""
        reason, final_answer = "budget-exhausted", None
        for t in range(1, self.p.t_max + 1):
            answer = self._ask("generate", CONTEXT=problem.context_text(), QUERY=problem.query,
                               PREVIOUS_ANSWER=previous, FEEDBACK=feedback_text).strip()
            items, alerts = self.decompose(answer)
            claims = self._claims(items)
            rec = self.verify_answer(problem, ctx, t, answer, claims, alerts=alerts)
            iterations.append(rec)
            _emit(trace, rec.to_json())
            if rec.score.final > best_score or best_answer is None:
                if rec.score.final > best_score:
                    best_score = rec.score.final
                best_answer, best_t = answer, t
            if rec.accepted:
                reason, final_answer = "accepted", answer
                break
            if self._converged(iterations):
                reason = "converged"
                break
            previous = answer
            feedback_text = rec.feedback.render() if rec.feedback else ""
        if final_answer is None:
            final_answer = best_answer
        traj = Trajectory(problem.id, ctx, iterations, final_answer, reason, best_answer, best_score, best_t)
        _emit(trace, {"record": "terminal", "reason": reason, "answer": final_answer,
                      "best_score": best_score, "best_iteration": best_t, "iterations": len(iterations)})
        return traj

    def _converged(self, iterations: list[IterationRecord]) -> bool:
        w = max(2, self.p.convergence_window)
        if len(iterations) < w:
            return False
        recent = [r.score.final for r in iterations[-w:]]
        return all(abs(a - b) < self.p.epsilon for a, b in zip(recent, recent[1:]))

    def verify_problem(self, problem: Problem) -> IterationRecord:
        """One verification pass over a problem's pre-supplied claims."""
        ctx = self.setup(problem)
        claims = []
        for i, g in enumerate(problem.claims):
            conf = self.p.default_confidence if g.confidence is None else g.confidence
            claims.append(Claim(i, g.text, claim_type_from_label(g.type), conf))
        return self.verify_answer(problem, ctx, 1, "", claims, [g.smt for g in problem.claims])


def _sig_text(sig: Signature) -> str:
    return "\n".join(render_declarations(sig))


def _emit(trace: Optional[TextIO], record: dict) -> None:
    if trace is None:
        return
    trace.write(json.dumps(record, ensure_ascii=False) + "\n")
    trace.flush()


__all__ = ["ContextState", "Feedback", "IterationRecord", "Refiner", "Trajectory"]
