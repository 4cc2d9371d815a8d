"""Verify model-generated answers claim by claim and refine them with solver feedback."""

from .claims import Claim, ClaimType, Status
from .config import Config
from .problem import Problem
from .refine import Refiner, Trajectory
from .scoring import aggregate
from .solver import SessionPool, SolverConfig, SolverSession

__version__ = "0.1.0"

__all__ = [
    "Claim",
    "ClaimType",
    "Config",
    "Problem",
    "Refiner",
    "SessionPool",
    "SolverConfig",
    "SolverSession",
    "Status",
    "Trajectory",
    "aggregate",
]
