import sys
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import needs_solver
from verge.cascade import (
    BridgingAxiom,
    JudgeVote,
    boolean_abstraction,
    inject_bridging_axioms,
    route,
    verify_claim,
    verify_smt,
    verify_soft,
)
from verge.claims import Claim, ClaimType, Route, Status
from verge.errors import InconsistentContext
from verge.logic import (
    BOOL,
    INT,
    Atom,
    Compare,
    Const,
    Exists,
    FunctionDecl,
    IntLit,
    NamedAssertion,
    Signature,
    Sort,
    Var,
)
from verge.solver import SolverConfig, SolverSession

PERSON = Sort("Person")
SIG = Signature(
    sorts=(PERSON,),
    entities=(("ann", PERSON), ("bob", PERSON)),
    constants=(("x", INT), ("wet", BOOL)),
    predicates=(FunctionDecl("Tall", (PERSON,), BOOL),),
)
CTX = [
    NamedAssertion("x_is_2", Compare("=", Const("x"), IntLit(2))),
    NamedAssertion("ann_tall", Atom("Tall", (Const("ann"),))),
]
SOFT = [JudgeVote(Status.SUPPORTED, 0.9), JudgeVote(Status.SUPPORTED, 0.8), JudgeVote(Status.UNCERTAIN, 0.5)]


def claim(f, kind=ClaimType.MATHEMATICAL, i=0):
    return Claim(i, "a claim", kind, 0.9, None, f)


def test_routing_is_total():
    for t in ClaimType:
        assert route(t) in (Route.SMT, Route.SOFT)
    assert {t for t in ClaimType if route(t) is Route.SMT} == {
        ClaimType.MATHEMATICAL, ClaimType.LOGICAL, ClaimType.TEMPORAL}


@needs_solver
@pytest.mark.parametrize("f,want", [
    (Compare(">=", Const("x"), IntLit(1)), Status.ENTAILED),
    (Compare(">", Const("x"), IntLit(5)), Status.CONTRADICTORY),
    (Atom("Tall", (Const("bob"),)), Status.POSSIBLE),
    (Exists("p", PERSON, Atom("Tall", (Var("p"),))), Status.ENTAILED),
])
def test_verify_smt_statuses(session, f, want):
    c = claim(f)
    assert verify_smt(c, CTX, SIG, session) is want
    if want is Status.CONTRADICTORY:
        assert set(c.core) == {"x_is_2", "claim_0"}


@needs_solver
def test_inconsistent_context_raises(session):
    bad = [*CTX, NamedAssertion("x_is_3", Compare("=", Const("x"), IntLit(3)))]
    with pytest.raises(InconsistentContext):
        verify_smt(claim(Atom("wet")), bad, SIG, session)


def test_verify_soft_weighted_vote():
    assert verify_soft(SOFT) == (Status.SUPPORTED, pytest.approx(1.7 / 2.2))
    assert verify_soft([]) == (Status.UNCERTAIN, 0.0)
    assert verify_soft([JudgeVote(Status.SUPPORTED, 0.0)]) == (Status.UNCERTAIN, 0.0)


def test_ties_go_to_the_cautious_verdict():
    tie = [JudgeVote(Status.SUPPORTED, 0.6), JudgeVote(Status.UNSUPPORTED, 0.6)]
    assert verify_soft(tie)[0] is Status.UNSUPPORTED
    tie = [JudgeVote(Status.PLAUSIBLE, 0.4), JudgeVote(Status.SUPPORTED, 0.4)]
    assert verify_soft(tie)[0] is Status.PLAUSIBLE


def test_judge_votes_must_be_soft_statuses():
    with pytest.raises(ValueError):
        JudgeVote(Status.ENTAILED, 1.0)


@given(st.lists(st.tuples(st.sampled_from([Status.SUPPORTED, Status.PLAUSIBLE, Status.UNSUPPORTED,
                                           Status.UNCERTAIN]), st.floats(0, 1)), max_size=6))
def test_verify_soft_share_is_a_probability(votes):
    status, share = verify_soft([JudgeVote(s, c) for s, c in votes])
    assert 0.0 <= share <= 1.0
    assert status in (Status.SUPPORTED, Status.PLAUSIBLE, Status.UNSUPPORTED, Status.UNCERTAIN)


def test_boolean_abstraction_only_for_accepted_soft_claims():
    c = Claim(3, "probably rains", ClaimType.PROBABILISTIC, 0.8, Status.PLAUSIBLE)
    sig, a = boolean_abstraction(c, SIG)
    assert a.label == "soft_3" and a.formula == Atom("b_3")
    assert sig.constant_sort("b_3") == BOOL and c.abstraction == "b_3"
    assert c.assertion() == a
    rejected = Claim(4, "x", ClaimType.VAGUE, 0.8, Status.UNSUPPORTED)
    assert boolean_abstraction(rejected, SIG) == (SIG, None)
    assert rejected.assertion() is None


def test_bridging_axioms_parse_strictly():
    sig = SIG.with_constant("b_1", BOOL)
    axioms = [BridgingAxiom("(assert (=> b_1 wet))"), BridgingAxiom("(assert (=> b_1 snowing))"),
              BridgingAxiom("(assert (forall ((p Person)) (=> b_1 (Tall p))))")]
    out, sig2, alerts = inject_bridging_axioms(axioms, sig)
    assert [a.label for a in out] == ["bridge_0", "bridge_2"]
    assert len(alerts) == 1 and "bridging axiom 1" in alerts[0]
    assert sig2 == sig


@needs_solver
def test_verify_claim_routes_and_falls_back(session):
    seen = []

    def judge(c):
        seen.append(c.index)
        return SOFT

    smt = claim(Compare(">=", Const("x"), IntLit(1)), i=0)
    assert verify_claim(smt, CTX, SIG, session, judge) is Status.ENTAILED
    assert smt.verify_route is Route.SMT
    soft = claim(None, ClaimType.COMMONSENSE, i=1)
    assert verify_claim(soft, CTX, SIG, session, judge) is Status.SUPPORTED
    unformalized = claim(None, ClaimType.LOGICAL, i=2)
    assert verify_claim(unformalized, CTX, SIG, session, judge) is Status.SUPPORTED
    assert unformalized.verify_route is Route.SOFT and "no formalization" in unformalized.fallback
    assert seen == [1, 2]


def test_solver_failure_falls_back_to_judges():
    broken = SolverSession(SolverConfig(path="/nonexistent/solver"))
    c = claim(Compare(">=", Const("x"), IntLit(1)))
    assert verify_claim(c, CTX, SIG, broken, lambda _: SOFT) is Status.SUPPORTED
    assert c.verify_route is Route.SOFT and c.fallback.startswith("SolverUnavailable")
    c2 = claim(Compare(">=", Const("x"), IntLit(1)))
    assert verify_claim(c2, CTX, SIG, broken, None) is Status.UNCERTAIN


def test_unknown_verdict_goes_soft_when_hybrid():
    fake = str(Path(__file__).with_name("fake_solver.py"))
    hang = SolverSession(SolverConfig(path=sys.executable, args=(fake, "hang"), timeout_ms=30, grace_ms=100))
    c = claim(Atom("wet"))
    assert verify_claim(c, CTX, SIG, hang, lambda _: SOFT) is Status.SUPPORTED
    assert c.fallback == "solver returned unknown"
    c2 = claim(Atom("wet"))
    assert verify_claim(c2, CTX, SIG, hang, lambda _: SOFT, hybrid_on_unknown=False) is Status.UNKNOWN
    hang.close()
