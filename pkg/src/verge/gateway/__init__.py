"""Language-model stages behind a backend-agnostic front door."""

from .base import Backend, Gateway, Sampling, StageRequest
from .http import HttpBackend
from .parsing import (
    DecomposedClaim,
    claim_type_from_label,
    parse_bridging,
    parse_classification,
    parse_decomposition,
    parse_entities,
    parse_formalization,
    parse_judge,
    parse_similarity,
)
from .prompts import SALIENT, STAGES
from .scripted import ScriptedBackend, fixture_key

__all__ = [
    "Backend",
    "DecomposedClaim",
    "Gateway",
    "HttpBackend",
    "SALIENT",
    "STAGES",
    "Sampling",
    "ScriptedBackend",
    "StageRequest",
    "claim_type_from_label",
    "fixture_key",
    "parse_bridging",
    "parse_classification",
    "parse_decomposition",
    "parse_entities",
    "parse_formalization",
    "parse_judge",
    "parse_similarity",
]
