import pytest
from hypothesis import given, settings

from conftest import needs_solver
from gen import prop_formulas, prop_sig
from verge.equivalence import (
    CandidateSet,
    ConsensusStatus,
    Decision,
    check_strengthening,
    combine_confidence,
    consensus,
    equivalent,
    majority,
    max_clique,
    round_trip_similarity,
)
from verge.errors import GatewayUnavailable
from verge.logic import And, Atom, Const, Exists, ForAll, FunctionDecl, Implies, Not, Or, Signature, Sort, Var, BOOL
from verge.oracles import oracle_equiv

p, q = Atom("p0"), Atom("p1")
SIG = prop_sig(4)


def test_majority():
    assert [majority(k) for k in (1, 2, 3, 4, 5)] == [1, 1, 2, 2, 3]


def test_max_clique_returns_every_maximum():
    edges = {(0, 1), (1, 2), (0, 2), (2, 3)}
    assert max_clique(4, lambda i, j: (i, j) in edges) == [(0, 1, 2)]
    assert max_clique(3, lambda i, j: False) == [(0,), (1,), (2,)]
    assert max_clique(0, lambda i, j: True) == []


def test_combine_confidence():
    assert combine_confidence(2, 3, None) == pytest.approx(2 / 3)
    assert combine_confidence(3, 3, 0.5) == pytest.approx(0.7 + 0.15)


def test_candidate_set_bounds():
    with pytest.raises(ValueError):
        CandidateSet((p, q), k=1)
    with pytest.raises(ValueError):
        CandidateSet((), k=0)


def test_empty_candidate_set_is_ambiguous():
    res = consensus(CandidateSet((), 3), SIG, session=None)
    assert res.status is ConsensusStatus.AMBIGUOUS and res.representative is None and res.confidence == 0


@needs_solver
def test_equivalent_decisions(session):
    assert equivalent(Implies(p, q), Or((Not(p), q)), SIG, session) is Decision.YES
    assert equivalent(p, q, SIG, session) is Decision.NO
    assert check_strengthening(And((p, q)), p, SIG, session) is Decision.YES
    assert check_strengthening(p, And((p, q)), SIG, session) is Decision.NO


@needs_solver
def test_quantified_formulas_are_grounded(session):
    person = Sort("Person")
    sig = Signature(sorts=(person,), entities=(("a", person), ("b", person)),
                    predicates=(FunctionDecl("P", (person,), BOOL),))
    every = ForAll("x", person, Atom("P", (Var("x"),)))
    not_some_not = Not(Exists("x", person, Not(Atom("P", (Var("x"),)))))
    both = And((Atom("P", (Const("a"),)), Atom("P", (Const("b"),))))
    assert equivalent(every, not_some_not, sig, session) is Decision.YES
    assert equivalent(every, both, sig, session) is Decision.YES


@needs_solver
def test_consensus_picks_majority_clique(session):
    a = Implies(p, q)
    b = Or((Not(p), q))
    c = And((p, q))
    res = consensus(CandidateSet((a, c, b), 3), SIG, session)
    assert res.accepted and res.clique == (0, 2) and res.confidence == pytest.approx(2 / 3)
    # the representative is the smallest rendering in the clique
    assert res.representative == a
    assert res.low_confidence


@needs_solver
def test_consensus_without_majority_is_ambiguous(session):
    res = consensus(CandidateSet((p, q, Not(p), Not(q)), 5), SIG, session)
    assert res.status is ConsensusStatus.AMBIGUOUS and res.clique_size == 1


@needs_solver
def test_consensus_blends_similarity(session):
    res = consensus(CandidateSet((p, p, p), 3), SIG, session, similarity_fn=lambda f: 0.0)
    assert res.confidence == pytest.approx(0.7) and not res.low_confidence


class _Gw:
    def __init__(self, fail=False):
        self.calls = []
        self.fail = fail

    def ask(self, stage, **slots):
        self.calls.append((stage, slots))
        if self.fail:
            raise GatewayUnavailable("down")
        return "  Alan drinks wine.\n" if stage == "verbalize" else "0.85"


def test_round_trip_similarity_calls():
    gw = _Gw()
    assert round_trip_similarity(Atom("p0"), "p holds", gw) == 0.85
    assert gw.calls == [("verbalize", {"FORMULA": "p0"}),
                        ("similarity", {"TEXT_A": "p holds", "TEXT_B": "Alan drinks wine."})]
    assert round_trip_similarity(Atom("p0"), "p holds", _Gw(fail=True)) is None


@needs_solver
@settings(max_examples=60)
@given(prop_formulas(), prop_formulas())
def test_solver_agrees_with_truth_tables(session, a, b):
    want = Decision.YES if oracle_equiv(a, b) else Decision.NO
    assert equivalent(a, b, SIG, session) is want
