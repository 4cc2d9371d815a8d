"""Child-process bridge to an SMT-LIB2 solver speaking over stdin/stdout.

Each query runs inside its own ``(push 1)``/``(pop 1)`` scope, so a
session can be reused for unrelated signatures. A session that dies is
restarted once and the query replayed; a second failure is reported as
SolverCrashed. A query that outlives its wall-clock budget kills the
process and is answered ``unknown``.
"""

from __future__ import annotations

import contextlib
import enum
import logging
import os
import queue
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import ProtocolError, SolverCrashed, SolverUnavailable
from .logic.ast import NamedAssertion, Not, Origin, Signature
from .logic.sexpr import SList, parse_all
from .logic.smtlib import render_assertion, render_declarations, validate_assertions

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_MS = 2000


class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SatResult:
    verdict: Verdict
    core: tuple[str, ...] = ()
    wall_ms: float = 0.0


@dataclass
class SolverConfig:
    path: str = "z3"
    args: tuple[str, ...] = ("-in", "-smt2")
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    pool_size: int = 2
    logic: str = "ALL"
    # solver option used for per-query limits; None disables it and
    # leaves only the wall-clock guard
    timeout_option: Optional[str] = "timeout"
    grace_ms: int = 3000

    def resolved(self) -> "SolverConfig":
        """Copy with the VERGE_SOLVER environment override applied."""
        env = os.environ.get("VERGE_SOLVER")
        if not env:
            return self
        return SolverConfig(env, self.args, self.timeout_ms, self.pool_size,
                            self.logic, self.timeout_option, self.grace_ms)


class _Crash(Exception):
    pass


class _Timeout(Exception):
    pass


_EOF = object()


class SolverSession:
    """One long-lived solver process. Not thread-safe; lease from a pool."""

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = (config or SolverConfig()).resolved()
        self.calls = 0
        self.total_ms = 0.0
        self.restarts = 0
        self.depth = 0
        self._proc: Optional[subprocess.Popen] = None
        self._lines: "queue.Queue[object]" = queue.Queue()
        self._timeout_set: Optional[int] = None

    # process management

    @property
    def alive(self) -> bool:
        return self._proc is not None and self._proc.poll() is None

    def _start(self) -> None:
        cmd = [self.config.path, *self.config.args]
        try:
            proc = subprocess.Popen(
                cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
                text=True, bufsize=1,
            )
        except OSError as exc:
            raise SolverUnavailable(
                f"cannot start solver {self.config.path!r} ({exc}); install z3 "
                f"or point VERGE_SOLVER / solver.path at an SMT-LIB2 solver"
            ) from None
        self._proc = proc
        self._lines = lines = queue.Queue()
        threading.Thread(target=_pump, args=(proc.stdout, lines), daemon=True).start()
        self._timeout_set = None
        self.depth = 0
        self._send(f"(set-option :produce-unsat-cores true)\n(set-logic {self.config.logic})\n")

    def _kill(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        with contextlib.suppress(Exception):
            proc.kill()
            proc.wait(timeout=5)
        for stream in (proc.stdin, proc.stdout):
            with contextlib.suppress(Exception):
                stream.close()

    def close(self) -> None:
        if self.alive:
            with contextlib.suppress(Exception):
                self._send("(exit)\n")
        self._kill()

    def reset(self) -> None:
        self._kill()
        self._start()

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # wire protocol

    def _send(self, text: str) -> None:
        try:
            self._proc.stdin.write(text)
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, AttributeError, ValueError):
            raise _Crash() from None

    def _readline(self, deadline: float) -> str:
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise _Timeout()
            try:
                item = self._lines.get(timeout=remaining)
            except queue.Empty:
                raise _Timeout() from None
            if item is _EOF:
                raise _Crash()
            line = str(item).strip()
            if line and not line.startswith("WARNING"):
                return line

    def _read_sexpr(self, deadline: float) -> str:
        buf = self._readline(deadline)
        while buf.count("(") > buf.count(")"):
            buf += " " + self._readline(deadline)
        return buf

    # queries

    def check(
        self,
        assertions: Sequence[NamedAssertion],
        sig: Signature,
        timeout_ms: Optional[int] = None,
        want_core: bool = True,
    ) -> SatResult:
        """Decide satisfiability of the conjunction of ``assertions``."""
        validate_assertions(assertions, sig)
        timeout = self.config.timeout_ms if timeout_ms is None else timeout_ms
        body = "\n".join([*render_declarations(sig), *map(render_assertion, assertions)])
        labels = {a.label for a in assertions}
        self.calls += 1
        started = time.monotonic()
        try:
            for attempt in range(2):
                try:
                    if not self.alive:
                        if attempt or self._proc is not None:
                            self.restarts += 1
                        self._start()
                    return self._check_once(body, labels, timeout, want_core, started)
                except _Crash:
                    log.warning("solver process died; restarting (attempt %d)", attempt + 1)
                    self._kill()
                    self.restarts += 1
            raise SolverCrashed("solver crashed twice on the same query")
        finally:
            self.total_ms += (time.monotonic() - started) * 1000

    def _check_once(self, body: str, labels: set[str], timeout: int, want_core: bool,
                    started: float) -> SatResult:
        opt = self.config.timeout_option
        script = ["(push 1)", body, "(check-sat)"]
        if opt and self._timeout_set != timeout:
            script.insert(0, f"(set-option :{opt} {max(1, int(timeout))})")
            self._timeout_set = timeout
        self._send("\n".join(script) + "\n")
        self.depth = 1
        deadline = time.monotonic() + (timeout + self.config.grace_ms) / 1000
        errors: list[str] = []
        try:
            while True:
                line = self._readline(deadline)
                if line.startswith("(error"):
                    errors.append(line)
                    continue
                if line in ("sat", "unsat", "unknown", "timeout"):
                    break
                raise ProtocolError(f"unexpected solver output: {line[:200]}")
            verdict = Verdict.UNKNOWN if line == "timeout" else Verdict(line)
            core: tuple[str, ...] = ()
            if verdict is Verdict.UNSAT and want_core:
                self._send("(get-unsat-core)\n")
                core = _parse_core(self._read_sexpr(deadline))
        except _Timeout:
            log.info("solver exceeded %d ms wall clock; killing it", timeout)
            self._kill()
            return SatResult(Verdict.UNKNOWN, (), (time.monotonic() - started) * 1000)
        self._send("(pop 1)\n")
        self.depth = 0
        if errors:
            raise ProtocolError("solver rejected the query: " + "; ".join(errors)[:500])
        unknown = [c for c in core if c not in labels]
        if unknown:
            raise ProtocolError(f"core mentions labels that were never asserted: {unknown}")
        return SatResult(verdict, core, (time.monotonic() - started) * 1000)


def _pump(stream, lines: "queue.Queue[object]") -> None:
    try:
        for line in stream:
            lines.put(line)
    except (OSError, ValueError):
        pass
    lines.put(_EOF)


def _parse_core(text: str) -> tuple[str, ...]:
    try:
        items = parse_all(text)
    except Exception as exc:
        raise ProtocolError(f"unreadable unsat core: {text[:200]}") from exc
    if len(items) != 1 or not isinstance(items[0], SList):
        raise ProtocolError(f"unreadable unsat core: {text[:200]}")
    return tuple(str(x) for x in items[0])


# -- pooling ----------------------------------------------------------------


@dataclass
class SessionPool:
    """Hands out exclusive leases on up to ``size`` sessions."""

    config: SolverConfig = field(default_factory=SolverConfig)
    size: Optional[int] = None

    def __post_init__(self):
        self.size = self.size or self.config.pool_size
        self._idle: "queue.LifoQueue[SolverSession]" = queue.LifoQueue()
        self._created = 0
        self._all: list[SolverSession] = []
        self._lock = threading.Lock()

    @contextlib.contextmanager
    def lease(self) -> Iterator[SolverSession]:
        session = self._acquire()
        try:
            yield session
        finally:
            self._idle.put(session)

    def _acquire(self) -> SolverSession:
        try:
            return self._idle.get_nowait()
        except queue.Empty:
            pass
        with self._lock:
            if self._created < self.size:
                self._created += 1
                s = SolverSession(self.config)
                self._all.append(s)
                return s
        return self._idle.get()

    @property
    def calls(self) -> int:
        return sum(s.calls for s in self._all)

    def close(self) -> None:
        for s in self._all:
            s.close()

    def __enter__(self) -> "SessionPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# -- entailment -------------------------------------------------------------


class Entailment(enum.Enum):
    ENTAILED = "entailed"
    NOT_ENTAILED = "not-entailed"
    UNKNOWN = "unknown"


NEGATED_CLAIM_LABEL = "negated_claim"


def check_entailment(
    session: SolverSession,
    context: Sequence[NamedAssertion],
    claim,
    sig: Signature,
    timeout_ms: Optional[int] = None,
) -> Entailment:
    """Context entails claim iff context plus the negated claim is unsat."""
    probe = NamedAssertion(NEGATED_CLAIM_LABEL, Not(claim), Origin.CLAIM)
    res = session.check([*context, probe], sig, timeout_ms, want_core=False)
    if res.verdict is Verdict.UNSAT:
        return Entailment.ENTAILED
    if res.verdict is Verdict.SAT:
        return Entailment.NOT_ENTAILED
    return Entailment.UNKNOWN
