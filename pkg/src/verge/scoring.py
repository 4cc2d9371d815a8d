"""Per-claim scores and the variance-penalised answer score."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from .claims import Status
from .errors import EmptyAnswer

STATUS_SCORES = {
    Status.ENTAILED: 1.0,
    Status.SUPPORTED: 0.9,
    Status.POSSIBLE: 0.7,
    Status.PLAUSIBLE: 0.7,
    Status.CONTRADICTORY: 0.0,
    Status.UNSUPPORTED: 0.0,
    Status.UNCERTAIN: 0.0,
    Status.UNKNOWN: 0.0,
}

# keeps the penalty finite when every claim scores zero
STABILITY_EPS = 0.01
PENALTY_FLOOR = 0.5
DEFAULT_ACCEPT_THRESHOLD = 0.75


def status_score(status: Status) -> float:
    return STATUS_SCORES[status]


@dataclass(frozen=True)
class AnswerScore:
    per_claim: tuple[float, ...]
    mean: float
    std: float
    penalty: float
    final: float
    joint_sat: bool
    accepted: bool


def variance_penalty(mean: float, std: float) -> float:
    return max(PENALTY_FLOOR, 1 - std / (mean + STABILITY_EPS))


def aggregate(scores: Sequence[float], joint_sat: bool,
              tau_acc: float = DEFAULT_ACCEPT_THRESHOLD) -> AnswerScore:
    """Mean claim score scaled by a dispersion penalty (population std).

    An answer is accepted only when the final score reaches ``tau_acc``
    and its claims are jointly satisfiable with the context.
    """
    if not scores:
        raise EmptyAnswer("an answer needs at least one claim to be scored")
    mean = statistics.fmean(scores)
    std = statistics.pstdev(scores)
    penalty = variance_penalty(mean, std)
    final = mean * penalty
    return AnswerScore(tuple(scores), mean, std, penalty, final, joint_sat,
                       final >= tau_acc and joint_sat)
