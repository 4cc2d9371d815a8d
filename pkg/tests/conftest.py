import os
import shutil
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from verge.solver import SessionPool, SolverConfig, SolverSession

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=100,
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

HAVE_SOLVER = bool(os.environ.get("VERGE_SOLVER") or shutil.which("z3"))
needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no z3 on PATH and VERGE_SOLVER unset")


@pytest.fixture(scope="session")
def session():
    if not HAVE_SOLVER:
        pytest.skip("no SMT solver available")
    s = SolverSession(SolverConfig())
    yield s
    s.close()


@pytest.fixture
def pool():
    if not HAVE_SOLVER:
        pytest.skip("no SMT solver available")
    with SessionPool(SolverConfig(), size=2) as p:
        yield p


# one line per acceptance criterion, echoed in the terminal summary
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
