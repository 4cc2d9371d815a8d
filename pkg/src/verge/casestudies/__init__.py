"""Bundled worked examples, replayed offline against scripted model output.

Each case directory holds ``problem.json``, ``fixtures.json`` (scripted
gateway responses), ``config.json`` and ``expected.json``. The expected
file lists per-iteration statuses, joint-check outcomes, correction sets,
core labels and scores that a replay must reproduce.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..config import Config
from ..gateway import Gateway, ScriptedBackend
from ..problem import Problem
from ..refine import Refiner, Trajectory
from ..solver import SessionPool

CASES = ("folio", "zebra", "arlsat")
HERE = Path(__file__).parent


def case_dir(name: str) -> Path:
    if name not in CASES:
        raise ValueError(f"unknown case study {name!r}")
    return HERE / name


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ReplayResult:
    trajectory: Trajectory
    checks: list[Check]
    trace: str

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def load_case(name: str) -> tuple[Problem, Config, dict]:
    d = case_dir(name)
    problem = Problem.load(d / "problem.json")
    config = Config.load(d / "config.json")
    config.gateway.fixtures = str(d / "fixtures.json")
    expected = json.loads((d / "expected.json").read_text(encoding="utf-8"))
    return problem, config, expected


def run_case(name: str, solver_path: Optional[str] = None) -> tuple[Trajectory, str, dict]:
    problem, config, expected = load_case(name)
    if solver_path:
        config.solver.path = solver_path
    gateway = Gateway(ScriptedBackend.from_file(config.gateway.fixtures), config.gateway.sampling())
    buf = io.StringIO()
    with SessionPool(config.solver) as pool:
        traj = Refiner(gateway, pool, config).run(problem, buf)
    return traj, buf.getvalue(), expected


def check_expectations(traj: Trajectory, expected: dict) -> list[Check]:
    checks: list[Check] = []
    want_reason = expected.get("terminal")
    if want_reason:
        checks.append(Check(f"terminal reason {want_reason}", traj.reason == want_reason, traj.reason))
    for exp in expected.get("iterations", []):
        t = exp["t"]
        if t > len(traj.iterations):
            checks.append(Check(f"iteration {t} ran", False, f"only {len(traj.iterations)} ran"))
            continue
        rec = traj.iterations[t - 1]
        by_index = {c.index: c for c in rec.claims}
        for idx, status in exp.get("statuses", {}).items():
            got = by_index.get(int(idx))
            got_status = got.status.value if got and got.status else None
            checks.append(Check(f"t={t} claim {idx} is {status}", got_status == status, str(got_status)))
        for idx, labels in exp.get("core_includes", {}).items():
            got = by_index.get(int(idx))
            core = set(got.core) if got else set()
            missing = sorted(set(labels) - core)
            checks.append(Check(f"t={t} claim {idx} core includes {labels}", not missing, f"core {sorted(core)}"))
        if "joint_sat" in exp:
            checks.append(Check(f"t={t} joint_sat={exp['joint_sat']}", rec.joint_sat == exp["joint_sat"],
                                str(rec.joint_sat)))
        if "joint_core_includes" in exp:
            missing = sorted(set(exp["joint_core_includes"]) - set(rec.joint_core))
            checks.append(Check(f"t={t} joint core includes {exp['joint_core_includes']}", not missing,
                                f"core {list(rec.joint_core)}"))
        if "mcs" in exp:
            got = list(rec.correction.mcs) if rec.correction else None
            checks.append(Check(f"t={t} correction set {exp['mcs']}", got == exp["mcs"], str(got)))
        if "score" in exp:
            ok = math.isclose(rec.score.final, exp["score"], abs_tol=1e-3)
            checks.append(Check(f"t={t} score {exp['score']:.3f}", ok, f"{rec.score.final:.6f}"))
        if "accepted" in exp:
            checks.append(Check(f"t={t} accepted={exp['accepted']}", rec.accepted == exp["accepted"],
                                str(rec.accepted)))
    return checks


def replay(name: str, solver_path: Optional[str] = None, trace_path: Optional[str] = None) -> ReplayResult:
    traj, trace, expected = run_case(name, solver_path)
    if trace_path:
        Path(trace_path).write_text(trace, encoding="utf-8")
    return ReplayResult(traj, check_expectations(traj, expected), trace)
