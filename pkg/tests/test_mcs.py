import itertools
import random

import pytest

from conftest import needs_solver
from gen import prop_sig, random_clause_claims
from verge.claims import Claim, ClaimType, Status
from verge.errors import InconsistentContext, LimitExceeded
from verge.logic import INT, App, Arith, Compare, Const, FunctionDecl, IntLit, NamedAssertion, Signature, Sort
from verge.mcs import (
    CorrectionResult,
    exact_min_mcs,
    format_feedback,
    greedy_mcs,
    greedy_order,
    render_refinement,
)
from verge.oracles import oracle_sat

HOUSE = Sort("House")
ZEBRA = Signature(
    sorts=(HOUSE,),
    entities=(("Red", HOUSE), ("Blue", HOUSE), ("Green", HOUSE)),
    functions=(FunctionDecl("pos", (HOUSE,), INT),),
)


def pos(h):
    return App("pos", (Const(h),))


CONTEXT = [
    NamedAssertion("Blue_Right_Of_Red", Compare("=", pos("Blue"), Arith("+", (pos("Red"), IntLit(1))))),
    NamedAssertion("Green_Left_Blue_Constraint", Compare("<", pos("Green"), pos("Blue"))),
]


def placed(i, house, n, conf):
    return Claim(i, f"{house} is at {n}", ClaimType.LOGICAL, conf, Status.POSSIBLE,
                 Compare("=", pos(house), IntLit(n)))


def test_greedy_order_breaks_ties_by_index():
    cs = [placed(0, "Red", 1, 0.8), placed(1, "Blue", 2, 0.9), placed(2, "Green", 3, 0.8)]
    assert [c.index for c in greedy_order(cs)] == [1, 0, 2]


@needs_solver
def test_greedy_drops_the_conflicting_placement(session):
    claims = [placed(0, "Red", 1, 0.9), placed(1, "Blue", 2, 0.9), placed(2, "Green", 3, 0.9)]
    res = greedy_mcs(CONTEXT, claims, ZEBRA, session)
    assert res.mcs == (2,) and res.mss == (0, 1)
    assert res.sat_calls == 3 and res.order == (0, 1, 2)


@needs_solver
def test_confidence_decides_what_is_kept(session):
    claims = [placed(0, "Blue", 2, 0.5), placed(1, "Green", 3, 0.99)]
    res = greedy_mcs(CONTEXT, claims, ZEBRA, session)
    assert res.mcs == (0,)
    exact = exact_min_mcs(CONTEXT, claims, ZEBRA, session)
    assert exact.mcs == (0,) and len(exact.mcs) <= len(res.mcs)


@needs_solver
def test_inconsistent_context_is_detected(session):
    bad = [*CONTEXT, NamedAssertion("broken", Compare("<", pos("Blue"), pos("Red")))]
    with pytest.raises(InconsistentContext):
        greedy_mcs(bad, [placed(0, "Red", 1, 0.9)], ZEBRA, session, check_context=True)
    with pytest.raises(InconsistentContext):
        exact_min_mcs(bad, [placed(0, "Red", 1, 0.9)], ZEBRA, session)


def test_claims_without_assertions_are_rejected():
    c = Claim(0, "x", ClaimType.LOGICAL, 0.9, Status.CONTRADICTORY, None)
    with pytest.raises(ValueError):
        greedy_mcs([], [c], ZEBRA, session=None)


def test_exact_search_limit():
    claims = [placed(i, "Red", i, 0.9) for i in range(4)]
    with pytest.raises(LimitExceeded):
        exact_min_mcs([], claims, ZEBRA, session=None, limit=3)


@needs_solver
@pytest.mark.parametrize("seed", range(15))
def test_greedy_result_is_a_maximal_consistent_subset(session, seed):
    rng = random.Random(seed)
    claims = random_clause_claims(rng, rng.randint(3, 8), 5)
    sig = prop_sig(5)
    res = greedy_mcs([], claims, sig, session)
    f = {c.index: c.formalization for c in claims}
    assert res.sat_calls == len(claims)
    assert sorted(res.mss + res.mcs) == [c.index for c in claims]
    assert oracle_sat([f[i] for i in res.mss])
    for i in res.mcs:
        assert not oracle_sat([f[j] for j in res.mss] + [f[i]])
    exact = exact_min_mcs([], claims, sig, session)
    assert len(exact.mcs) <= len(res.mcs)
    for smaller in itertools.combinations(sorted(f), len(exact.mcs) - 1) if exact.mcs else ():
        assert not oracle_sat([f[i] for i in f if i not in smaller])


def test_feedback_and_template():
    claims = [placed(0, "Red", 1, 0.9), placed(2, "Green", 3, 0.9), placed(3, "Blue", 9, 0.5)]
    res = CorrectionResult(mss=(0,), mcs=(2, 3), sat_calls=3, uncertain=(3,))
    core = ["Green_Left_Blue_Constraint", "claim_1", "claim_2"]
    items = format_feedback(res, core, claims)
    assert [it.claim_index for it in items] == [2, 3]
    assert "Revise or retract claim 2" in items[0].directive and not items[0].uncertain
    assert items[1].uncertain and "could not decide" in items[1].directive
    text = render_refinement(items, core)
    assert "Status: UNSATISFIABLE" in text
    assert "[Green_Left_Blue_Constraint, claim_1, claim_2]" in text
    assert "[Z3_UNSAT_CORE]" not in text and "[MCS_DESCRIPTION]" not in text
    assert "- (none)" in render_refinement([], [])
