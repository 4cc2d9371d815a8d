"""Problem files: context premises, a query, and optional formalizations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .errors import ConfigError


@dataclass
class Premise:
    text: str
    label: Optional[str] = None
    smt: Optional[str] = None


@dataclass
class GivenClaim:
    """A claim with its formalization supplied, for solver-only runs."""

    text: str
    type: str = "LOGICAL"
    smt: Optional[str] = None
    confidence: Optional[float] = None


@dataclass
class Problem:
    id: str
    context: list[Premise]
    query: str
    gold: Optional[str] = None
    signature: Optional[dict] = None
    claims: list[GivenClaim] = field(default_factory=list)

    def premise_label(self, n: int) -> str:
        return self.context[n].label or f"Axiom_{n + 1}"

    def context_text(self) -> str:
        return "\n".join(f"{i + 1}. {p.text}" for i, p in enumerate(self.context))

    @classmethod
    def from_dict(cls, data: dict, source: str = "<problem>") -> "Problem":
        try:
            premises = []
            for item in data["context"]:
                if isinstance(item, str):
                    premises.append(Premise(item))
                else:
                    premises.append(Premise(item["text"], item.get("label"), item.get("smt")))
            claims = [
                GivenClaim(c["text"], c.get("type", "LOGICAL"), c.get("smt"), c.get("confidence"))
                for c in data.get("claims", [])
            ]
            return cls(str(data.get("id", Path(source).stem)), premises, str(data["query"]),
                       data.get("gold"), data.get("signature"), claims)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"{source}: malformed problem ({exc!r})") from None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Problem":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_dict(data, str(path))
