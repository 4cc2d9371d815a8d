"""Deterministic replay backend driven by a fixture file.

A fixture is JSON of the form::

    {"responses": [
        {"stage": "generate", "slots": {"QUERY": "...", "PREVIOUS_ANSWER": ""},
         "response": "..."},
        {"stage": "formalize", "slots": {"CLAIM": "..."}, "expand": "SAMPLE",
         "responses": ["<smt>...</smt>", "<smt>...</smt>", "<smt>...</smt>"]},
        {"stage": "judge", "key": "3f2a9c0b1d4e5f60", "response": "..."}
    ]}

``slots`` must name exactly the stage's salient slots. ``expand`` fans a
list of responses out over one slot, whose values become "0", "1", ...
Several entries for the same key are consumed in order and the last one
then keeps answering. A request with no entry raises FixtureMiss.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Mapping, Union

from ..errors import ConfigError, FixtureMiss
from .base import StageRequest
from .prompts import SALIENT


def fixture_key(stage: str, slots: Mapping[str, str]) -> str:
    """Stable short hash of a request's salient slot values."""
    values = [str(slots.get(name, "")) for name in SALIENT[stage]]
    payload = json.dumps([stage, values], ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


class ScriptedBackend:
    def __init__(self, responses: Mapping[tuple[str, str], list[str]]):
        self._responses = {k: list(v) for k, v in responses.items()}
        self._served: dict[tuple[str, str], int] = {}
        self._lock = threading.Lock()
        self.log: list[tuple[str, str]] = []

    @classmethod
    def from_document(cls, doc: Mapping) -> "ScriptedBackend":
        table: dict[tuple[str, str], list[str]] = {}
        entries = doc.get("responses")
        if not isinstance(entries, list):
            raise ConfigError("fixture: 'responses' must be a list")
        for n, entry in enumerate(entries):
            where = f"fixture responses[{n}]"
            stage = entry.get("stage")
            if stage not in SALIENT:
                raise ConfigError(f"{where}: unknown stage {stage!r}")
            if "key" in entry:
                table.setdefault((stage, entry["key"]), []).append(_text(entry, "response", where))
                continue
            slots = {k: str(v) for k, v in entry.get("slots", {}).items()}
            expand = entry.get("expand")
            need = set(SALIENT[stage]) - ({expand} if expand else set())
            if set(slots) != need:
                raise ConfigError(f"{where}: {stage} slots must be exactly {sorted(need)}, got {sorted(slots)}")
            if expand:
                texts = entry.get("responses")
                if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
                    raise ConfigError(f"{where}: 'responses' must be a list of strings")
                for i, text in enumerate(texts):
                    key = fixture_key(stage, {**slots, expand: str(i)})
                    table.setdefault((stage, key), []).append(text)
            else:
                table.setdefault((stage, fixture_key(stage, slots)), []).append(_text(entry, "response", where))
        return cls(table)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScriptedBackend":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        return cls.from_document(doc)

    def complete(self, request: StageRequest) -> str:
        key = (request.stage, fixture_key(request.stage, request.slots))
        with self._lock:
            queue = self._responses.get(key)
            if not queue:
                salient = {s: request.slots.get(s, "")[:80] for s in SALIENT[request.stage]}
                raise FixtureMiss(f"no scripted response for stage {request.stage} key {key[1]} {salient}")
            n = self._served.get(key, 0)
            self._served[key] = n + 1
            self.log.append(key)
            return queue[min(n, len(queue) - 1)]


def _text(entry: Mapping, name: str, where: str) -> str:
    val = entry.get(name)
    if not isinstance(val, str):
        raise ConfigError(f"{where}: '{name}' must be a string")
    return val
