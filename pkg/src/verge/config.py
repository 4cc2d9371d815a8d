"""Run configuration, loaded from JSON with per-key validation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union, get_type_hints

from .errors import ConfigError
from .gateway.base import Sampling
from .solver import SolverConfig


@dataclass
class GatewayConfig:
    backend: str = "scripted"
    endpoint: Optional[str] = None
    model: str = "default"
    fixtures: Optional[str] = None
    temperature: float = 1.0
    top_p: float = 0.99
    max_tokens: int = 10000
    thinking_budget: Optional[int] = 4000
    max_attempts: int = 3
    backoff_s: float = 1.0
    timeout_s: float = 120.0
    max_concurrency: int = 4

    def sampling(self) -> Sampling:
        return Sampling(self.temperature, self.top_p, self.max_tokens, self.thinking_budget)


@dataclass
class PipelineConfig:
    t_max: int = 3
    k: int = 3
    consensus_threshold: float = 0.70
    judges: int = 5
    tau_acc: float = 0.75
    epsilon: float = 0.01
    convergence_window: int = 2
    repair_rounds: int = 2
    round_trip: bool = True
    bridging: bool = True
    similarity_weight: float = 0.3
    default_confidence: float = 0.9
    hybrid_on_unknown: bool = True
    jobs: int = 1


@dataclass
class Config:
    solver: SolverConfig = field(default_factory=SolverConfig)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)

    @classmethod
    def from_dict(cls, data: dict, source: str = "<config>") -> "Config":
        if not isinstance(data, dict):
            raise ConfigError(f"{source}: top level must be an object")
        unknown = set(data) - {"solver", "gateway", "pipeline"}
        if unknown:
            raise ConfigError(f"{source}: unknown section(s) {sorted(unknown)}")
        return cls(
            solver=_section(SolverConfig, data.get("solver", {}), f"{source}:solver"),
            gateway=_section(GatewayConfig, data.get("gateway", {}), f"{source}:gateway"),
            pipeline=_section(PipelineConfig, data.get("pipeline", {}), f"{source}:pipeline"),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Config":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_dict(data, str(path))


def _section(kind, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: must be an object")
    hints = get_type_hints(kind)
    names = {f.name for f in dataclasses.fields(kind)}
    out = {}
    for key, value in data.items():
        if key not in names:
            raise ConfigError(f"{where}.{key}: unknown key")
        out[key] = _coerce(hints[key], value, f"{where}.{key}")
    return kind(**out)


def _coerce(hint, value, where: str):
    text = str(hint)
    optional = "Optional" in text or "None" in text
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{where}: may not be null")
    if "tuple" in text:
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{where}: expected a list of strings")
        return tuple(value)
    if "bool" in text:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true or false")
        return value
    if "int" in text and "float" not in text:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if "float" in text:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string")
    return value
