"""Command-line entry point: ``verge refine|verify|mcs|equiv|replay``."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .claims import Claim, ClaimType, Status
from .config import Config
from .equivalence import equivalent
from .errors import ConfigError, VergeError
from .gateway import Gateway, HttpBackend, ScriptedBackend
from .logic.ast import NamedAssertion, Origin, Signature
from .logic.smtlib import parse_smtlib_formula, parse_smtlib_script
from .mcs import exact_min_mcs, format_feedback, greedy_mcs
from .problem import Problem
from .refine import Refiner, Trajectory
from .solver import SessionPool, SolverSession

EXIT_ACCEPTED = 0
EXIT_ERROR = 1
EXIT_NOT_ACCEPTED = 2


def _config(args) -> Config:
    cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
    if getattr(args, "solver", None):
        cfg.solver.path = args.solver
    if getattr(args, "timeout_ms", None) is not None:
        cfg.solver.timeout_ms = args.timeout_ms
    if getattr(args, "jobs", None) is not None:
        cfg.pipeline.jobs = args.jobs
    if getattr(args, "backend", None):
        cfg.gateway.backend = args.backend
    if getattr(args, "fixtures", None):
        cfg.gateway.fixtures = args.fixtures
    return cfg


def build_gateway(cfg: Config) -> Gateway:
    g = cfg.gateway
    if g.backend == "scripted":
        if not g.fixtures:
            raise ConfigError("the scripted backend needs a fixture file (--fixtures or gateway.fixtures)")
        backend = ScriptedBackend.from_file(g.fixtures)
    elif g.backend == "http":
        backend = HttpBackend(g.endpoint, g.model, max_attempts=g.max_attempts,
                              backoff_s=g.backoff_s, timeout_s=g.timeout_s)
    else:
        raise ConfigError(f"gateway.backend must be 'scripted' or 'http', not {g.backend!r}")
    return Gateway(backend, g.sampling(), g.max_concurrency)


def _summary(traj: Trajectory) -> str:
    lines = [f"{traj.problem_id}: {traj.reason} after {len(traj.iterations)} iteration(s), "
             f"best score {traj.best_score:.3f}"]
    for rec in traj.iterations:
        statuses = ", ".join(f"{c.index}:{c.status.value}" for c in rec.claims)
        lines.append(f"  t={rec.t} score={rec.score.final:.3f} joint_sat={rec.joint_sat} [{statuses}]")
    lines.append(f"  answer: {traj.answer}")
    return "\n".join(lines)


def cmd_refine(args) -> int:
    cfg = _config(args)
    problems = [Problem.load(p) for p in args.problems]
    trace_dir = None
    if args.trace_out and len(problems) > 1:
        trace_dir = Path(args.trace_out)
        trace_dir.mkdir(parents=True, exist_ok=True)

    def one(problem: Problem) -> Trajectory:
        # a fresh gateway per problem keeps scripted replays independent
        gateway = build_gateway(cfg)
        with SessionPool(cfg.solver) as pool, contextlib.ExitStack() as stack:
            trace = None
            if trace_dir is not None:
                trace = stack.enter_context(open(trace_dir / f"{problem.id}.jsonl", "w", encoding="utf-8"))
            elif args.trace_out:
                trace = stack.enter_context(open(args.trace_out, "w", encoding="utf-8"))
            return Refiner(gateway, pool, cfg).run(problem, trace)

    if len(problems) > 1 and cfg.pipeline.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.pipeline.jobs) as ex:
            trajectories = list(ex.map(one, problems))
    else:
        trajectories = [one(p) for p in problems]
    for traj in trajectories:
        print(_summary(traj))
    return EXIT_ACCEPTED if all(t.accepted for t in trajectories) else EXIT_NOT_ACCEPTED


def cmd_verify(args) -> int:
    cfg = _config(args)
    problem = Problem.load(args.problem)
    with SessionPool(cfg.solver) as pool:
        rec = Refiner(None, pool, cfg).verify_problem(problem)
    for c in rec.claims:
        core = f" core={list(c.core)}" if c.core else ""
        print(f"claim {c.index} [{c.type.name}] {c.status.value}{core}: {c.text}")
    print(f"joint_sat={rec.joint_sat} score={rec.score.final:.3f} accepted={rec.accepted}")
    return EXIT_ACCEPTED if rec.accepted else EXIT_NOT_ACCEPTED


def _read_smt(path_or_text: str) -> str:
    p = Path(path_or_text)
    with contextlib.suppress(OSError):
        if p.is_file():
            return p.read_text(encoding="utf-8")
    return path_or_text


def load_mcs_inputs(context_path: str, claims_path: str):
    """Context and claims from SMT-LIB2 scripts with named assertions.

    Claims may carry a ``:confidence`` attribute next to ``:named``.
    """
    ctx = parse_smtlib_script(_read_smt(context_path), Signature(), lenient=False)
    context = [
        NamedAssertion(a.label or f"Axiom_{i + 1}", a.formula, Origin.CONTEXT_AXIOM)
        for i, a in enumerate(ctx.assertions)
    ]
    cl = parse_smtlib_script(_read_smt(claims_path), ctx.signature, lenient=False)
    claims = []
    for i, a in enumerate(cl.assertions):
        conf = float(a.attrs.get("confidence", 0.9))
        c = Claim(i, a.label or f"claim_{i}", ClaimType.LOGICAL, conf, Status.POSSIBLE, a.formula)
        claims.append(c)
    return context, claims, cl.signature


def cmd_mcs(args) -> int:
    cfg = _config(args)
    context, claims, sig = load_mcs_inputs(args.context, args.claims)
    with SolverSession(cfg.solver) as s:
        joint = s.check([*context, *(c.assertion() for c in claims)], sig, cfg.solver.timeout_ms)
        if args.exact:
            result = exact_min_mcs(context, claims, sig, s, args.limit, cfg.solver.timeout_ms)
        else:
            result = greedy_mcs(context, claims, sig, s, cfg.solver.timeout_ms)
    name = {c.index: c.text for c in claims}
    by_label = {c.label: c.text for c in claims}
    print(f"joint: {joint.verdict.value}")
    if joint.core:
        print("core: " + " ".join(by_label.get(label, label) for label in joint.core))
    print("mss: " + " ".join(name[i] for i in result.mss))
    print("mcs: " + " ".join(name[i] for i in result.mcs))
    print(f"sat_calls: {result.sat_calls}")
    for item in format_feedback(result, joint.core, claims):
        print(f"- {item.directive}")
    return 0


def cmd_equiv(args) -> int:
    cfg = _config(args)
    sig = Signature()
    if args.sig:
        sig = Signature.from_json(json.loads(Path(args.sig).read_text(encoding="utf-8")))
    a, sig = parse_smtlib_formula(_read_smt(args.a), sig, lenient=True)
    b, sig = parse_smtlib_formula(_read_smt(args.b), sig, lenient=True)
    with SolverSession(cfg.solver) as s:
        print(equivalent(a, b, sig, s, cfg.solver.timeout_ms).value)
    return 0


def cmd_replay(args) -> int:
    from .casestudies import replay

    result = replay(args.case, solver_path=args.solver, trace_path=args.trace_out)
    print(_summary(result.trajectory))
    for check in result.checks:
        print(f"{'ok  ' if check.ok else 'FAIL'} {check.name}" + (f" ({check.detail})" if check.detail else ""))
    return 0 if result.ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="verge", description="Verify and refine model answers with an SMT solver.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def solver_opts(p):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--solver", help="solver executable (overrides solver.path)")
        p.add_argument("--timeout-ms", type=int, help="per-query solver timeout")

    p = sub.add_parser("refine", help="run the refinement loop on one or more problem files")
    p.add_argument("problems", nargs="+")
    solver_opts(p)
    p.add_argument("--backend", choices=("scripted", "http"), default=None)
    p.add_argument("--fixtures", help="fixture file for the scripted backend")
    p.add_argument("--jobs", type=int, help="parallel workers")
    p.add_argument("--trace-out", help="JSONL trace file (a directory when several problems are given)")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("verify", help="verify the pre-formalized claims of a problem once")
    p.add_argument("problem")
    solver_opts(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mcs", help="correction set for claims against a context")
    p.add_argument("context", help="SMT-LIB2 script with the context assertions")
    p.add_argument("claims", help="SMT-LIB2 script with named claim assertions")
    p.add_argument("--exact", action="store_true", help="minimum-cardinality search instead of greedy")
    p.add_argument("--limit", type=int, default=12, help="claim limit for --exact")
    solver_opts(p)
    p.set_defaults(func=cmd_mcs)

    p = sub.add_parser("equiv", help="decide equivalence of two formulas")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--sig", help="signature JSON")
    solver_opts(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("replay", help="replay a bundled case study offline")
    p.add_argument("case", choices=("folio", "zebra", "arlsat"))
    p.add_argument("--solver")
    p.add_argument("--trace-out")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except VergeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
