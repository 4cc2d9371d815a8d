import sys
import threading
from pathlib import Path

import pytest

from conftest import needs_solver
from verge.errors import DuplicateLabel, ProtocolError, SolverCrashed, SolverUnavailable, UndeclaredSymbol
from verge.logic import (
    BOOL,
    INT,
    And,
    Atom,
    Compare,
    Const,
    FunctionDecl,
    Implies,
    IntLit,
    NamedAssertion,
    Not,
    Signature,
    Sort,
)
from verge.solver import (
    Entailment,
    SessionPool,
    SolverConfig,
    SolverSession,
    Verdict,
    check_entailment,
)

FAKE = str(Path(__file__).with_name("fake_solver.py"))
PERSON = Sort("Person")
ITEM = Sort("Item")
SIG = Signature(
    sorts=(PERSON, ITEM),
    entities=(("a", PERSON), ("Alan", PERSON), ("Wine", ITEM), ("Beer", ITEM)),
    constants=(("x", INT),),
    predicates=(
        FunctionDecl("P", (PERSON,), BOOL),
        FunctionDecl("Drinks", (PERSON, ITEM), BOOL),
        FunctionDecl("Guest", (PERSON,), BOOL),
    ),
)


def A(label, f):
    return NamedAssertion(label, f)


def drinks(item):
    return Atom("Drinks", (Const("Alan"), Const(item)))


def fake(mode, *extra, **kw):
    return SolverSession(SolverConfig(path=sys.executable, args=(FAKE, mode, *extra), **kw))


@needs_solver
def test_direct_contradiction_core(session):
    pa = Atom("P", (Const("a"),))
    res = session.check([A("c1", pa), A("c2", Not(pa))], SIG)
    assert res.verdict is Verdict.UNSAT
    assert set(res.core) == {"c1", "c2"}


@needs_solver
def test_empty_set_is_sat(session):
    assert session.check([], SIG).verdict is Verdict.SAT


@needs_solver
def test_core_names_only_responsible_assertions(session):
    guest = Atom("Guest", (Const("Alan"),))
    axioms = [
        A("Axiom_1", Implies(guest, drinks("Wine"))),
        A("Axiom_2", Not(And((drinks("Wine"), drinks("Beer"))))),
        A("Axiom_3", guest),
        A("Axiom_4", Compare(">", Const("x"), IntLit(3))),
    ]
    res = session.check([*axioms, A("claim_0", drinks("Beer"))], SIG)
    assert res.verdict is Verdict.UNSAT
    assert set(res.core) == {"Axiom_1", "Axiom_2", "Axiom_3", "claim_0"}


@needs_solver
def test_scopes_do_not_leak(session):
    pa = Atom("P", (Const("a"),))
    assert session.check([A("one", pa)], SIG).verdict is Verdict.SAT
    assert session.check([A("two", Not(pa))], SIG).verdict is Verdict.SAT
    assert session.depth == 0
    other = Signature(constants=(("x", BOOL),))
    assert session.check([A("three", Atom("x"))], other).verdict is Verdict.SAT


@needs_solver
def test_entailment(session):
    ctx = [A("ctx", Compare("=", Const("x"), IntLit(2)))]
    assert check_entailment(session, ctx, Compare(">=", Const("x"), IntLit(1)), SIG) is Entailment.ENTAILED
    assert check_entailment(session, ctx, Compare(">=", Const("x"), IntLit(3)), SIG) is Entailment.NOT_ENTAILED


@needs_solver
def test_counters(session):
    before = session.calls
    session.check([], SIG)
    assert session.calls == before + 1 and session.total_ms > 0


def test_rejects_bad_assertions_before_contacting_solver():
    s = SolverSession(SolverConfig(path="/nonexistent/solver"))
    with pytest.raises(DuplicateLabel):
        s.check([A("a", Atom("P", (Const("a"),))), A("a", Atom("P", (Const("a"),)))], SIG)
    with pytest.raises(UndeclaredSymbol):
        s.check([A("a", Atom("Q"))], SIG)
    assert s.calls == 0


def test_missing_binary_is_reported():
    s = SolverSession(SolverConfig(path="/nonexistent/solver"))
    with pytest.raises(SolverUnavailable, match="VERGE_SOLVER"):
        s.check([], SIG)


def test_environment_override(monkeypatch):
    monkeypatch.setenv("VERGE_SOLVER", "/opt/other-solver")
    assert SolverConfig(path="z3").resolved().path == "/opt/other-solver"
    monkeypatch.delenv("VERGE_SOLVER")
    assert SolverConfig(path="z3").resolved().path == "z3"


def test_crash_is_retried_once(tmp_path):
    s = fake("crash-once", str(tmp_path / "marker"))
    res = s.check([], SIG)
    assert res.verdict is Verdict.SAT
    assert s.restarts >= 1
    s.close()


def test_repeated_crash_raises():
    s = fake("crash-always")
    with pytest.raises(SolverCrashed):
        s.check([], SIG)
    s.close()


def test_unexpected_output_is_a_protocol_error():
    s = fake("garbage")
    with pytest.raises(ProtocolError):
        s.check([], SIG)
    s.close()


def test_solver_errors_are_surfaced():
    s = fake("error")
    with pytest.raises(ProtocolError, match="rejected"):
        s.check([], SIG)
    s.close()


def test_core_with_unknown_labels_is_rejected():
    s = fake("bad-core")
    with pytest.raises(ProtocolError, match="never asserted"):
        s.check([A("c1", Atom("P", (Const("a"),)))], SIG)
    s.close()


def test_wall_clock_timeout_yields_unknown_and_restarts():
    s = fake("hang", timeout_ms=50, grace_ms=200)
    res = s.check([], SIG)
    assert res.verdict is Verdict.UNKNOWN
    assert not s.alive
    s.close()


def test_pool_leases_are_exclusive():
    cfg = SolverConfig(path=sys.executable, args=(FAKE, "sat"))
    seen, clashes = [], []
    lock = threading.Lock()
    with SessionPool(cfg, size=2) as pool:
        def work():
            for _ in range(5):
                with pool.lease() as s:
                    with lock:
                        if s in seen:
                            clashes.append(s)
                        seen.append(s)
                    s.check([], SIG)
                    with lock:
                        seen.remove(s)
        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not clashes
        assert pool.calls == 20
        assert len(pool._all) <= 2
