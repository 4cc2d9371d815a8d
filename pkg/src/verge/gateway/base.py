"""Stage requests and the gateway front door shared by all backends."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol

from .prompts import STAGES, fill


@dataclass(frozen=True)
class Sampling:
    temperature: float = 1.0
    top_p: float = 0.99
    max_tokens: int = 10000
    # forwarded untouched to backends that understand it
    thinking_budget: Optional[int] = 4000


@dataclass(frozen=True)
class StageRequest:
    stage: str
    slots: Mapping[str, str]
    system: str
    prompt: str
    sampling: Sampling = field(default_factory=Sampling)


class Backend(Protocol):
    def complete(self, request: StageRequest) -> str: ...


class Gateway:
    """Builds stage prompts and forwards them to a backend.

    ``max_concurrency`` bounds in-flight requests across threads.
    """

    def __init__(self, backend: Backend, sampling: Optional[Sampling] = None, max_concurrency: int = 4):
        self.backend = backend
        self.sampling = sampling or Sampling()
        self._slots = threading.BoundedSemaphore(max(1, max_concurrency))

    def ask(self, stage: str, **slots: str) -> str:
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        slots = {k.upper(): ("" if v is None else str(v)) for k, v in slots.items()}
        system, prompt = fill(stage, slots)
        req = StageRequest(stage, slots, system, prompt, self.sampling)
        with self._slots:
            return self.backend.complete(req)
