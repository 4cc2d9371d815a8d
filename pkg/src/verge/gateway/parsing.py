"""Turning free-form model output into structured values."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Optional

from ..cascade import BridgingAxiom, JudgeVote
from ..claims import ClaimType, Status
from ..errors import FormulaError, MalformedOutput
from ..logic.ast import Signature
from ..logic.sexpr import SList, parse_all

TYPE_ALIASES = {
    "M": ClaimType.MATHEMATICAL, "MATH": ClaimType.MATHEMATICAL, "MATHS": ClaimType.MATHEMATICAL,
    "MATHEMATICAL": ClaimType.MATHEMATICAL, "ARITHMETIC": ClaimType.MATHEMATICAL,
    "NUMERIC": ClaimType.MATHEMATICAL, "NUMERICAL": ClaimType.MATHEMATICAL,
    "L": ClaimType.LOGICAL, "LOGIC": ClaimType.LOGICAL, "LOGICAL": ClaimType.LOGICAL,
    "DEDUCTIVE": ClaimType.LOGICAL,
    "T": ClaimType.TEMPORAL, "TEMPORAL": ClaimType.TEMPORAL, "TIME": ClaimType.TEMPORAL,
    "SCHEDULING": ClaimType.TEMPORAL,
    "P": ClaimType.PROBABILISTIC, "PROBABILISTIC": ClaimType.PROBABILISTIC,
    "PROBABILITY": ClaimType.PROBABILISTIC, "STATISTICAL": ClaimType.PROBABILISTIC,
    "C": ClaimType.COMMONSENSE, "COMMONSENSE": ClaimType.COMMONSENSE,
    "COMMON_SENSE": ClaimType.COMMONSENSE, "WORLD_KNOWLEDGE": ClaimType.COMMONSENSE,
    "FACTUAL": ClaimType.COMMONSENSE,
    "V": ClaimType.VAGUE, "VAGUE": ClaimType.VAGUE, "SUBJECTIVE": ClaimType.VAGUE,
}


def claim_type_from_label(label: str) -> ClaimType:
    """Map a model's type label to a claim type; unknown labels are vague."""
    norm = re.sub(r"[\s\-]+", "_", str(label).strip().upper())
    return TYPE_ALIASES.get(norm, ClaimType.VAGUE)


_FENCE = re.compile(r"```[A-Za-z0-9_-]*\s*\n?(.*?)```", re.S)


def strip_fences(text: str) -> str:
    m = _FENCE.search(text)
    return m.group(1) if m else text


def extract_json(text: str) -> Any:
    """First JSON value in ``text``, tolerating code fences and chatter."""
    body = strip_fences(text).strip()
    try:
        return json.loads(body)
    except json.JSONDecodeError:
        pass
    decoder = json.JSONDecoder()
    for i, ch in enumerate(body):
        if ch in "[{":
            try:
                return decoder.raw_decode(body, i)[0]
            except json.JSONDecodeError:
                continue
    raise MalformedOutput("no JSON value found in model output")


@dataclass(frozen=True)
class DecomposedClaim:
    text: str
    type: Optional[ClaimType]
    confidence: Optional[float] = None


def _confidence(value: Any) -> Optional[float]:
    try:
        return max(0.0, min(1.0, float(value)))
    except (TypeError, ValueError):
        return None


def parse_decomposition(text: str) -> list[DecomposedClaim]:
    """List of claims with optional type and confidence.

    An item without a ``type`` field comes back with ``type=None`` so the
    caller can ask the classifier. An empty list is returned as-is.
    """
    data = extract_json(text)
    if isinstance(data, dict) and isinstance(data.get("claims"), list):
        data = data["claims"]
    if not isinstance(data, list):
        raise MalformedOutput("decomposition is not a JSON list")
    out = []
    for item in data:
        if not isinstance(item, dict) or not isinstance(item.get("text"), str) or not item["text"].strip():
            raise MalformedOutput(f"malformed claim entry: {item!r}"[:200])
        kind = item.get("type")
        out.append(DecomposedClaim(
            item["text"].strip(),
            claim_type_from_label(kind) if kind is not None else None,
            _confidence(item.get("confidence")),
        ))
    return out


def parse_classification(text: str) -> tuple[ClaimType, Optional[float]]:
    try:
        data = extract_json(text)
    except MalformedOutput:
        word = re.match(r"\W*([A-Za-z_-]*)", text)
        return claim_type_from_label(word.group(1) if word else ""), None
    if isinstance(data, dict):
        return claim_type_from_label(data.get("type", "")), _confidence(data.get("confidence"))
    return claim_type_from_label(str(data)), None


_SMT_BLOCK = re.compile(r"<smt>(.*?)</smt>", re.S | re.I)
_DROP = re.compile(r"\((?:check-sat|get-model|exit)\s*\)")


def parse_formalization(text: str) -> str:
    """SMT-LIB2 text between ``<smt>`` tags, minus solver commands.

    Without tags the whole reply (fences removed) is accepted if it reads
    as parenthesized S-expressions; otherwise MalformedOutput.
    """
    blocks = _SMT_BLOCK.findall(text)
    body = "\n".join(blocks) if blocks else strip_fences(text)
    body = _DROP.sub("", body).strip()
    try:
        items = parse_all(body)
    except FormulaError as exc:
        raise MalformedOutput(f"formalization is not valid SMT-LIB2: {exc}") from None
    if not items:
        raise MalformedOutput("formalization is empty")
    # untagged prose like "sorry" would otherwise read as a Boolean symbol
    if not blocks and not all(isinstance(x, SList) for x in items):
        raise MalformedOutput("untagged reply is not a list of SMT-LIB2 commands")
    return body


_VERDICTS = {
    "SUPPORTED": Status.SUPPORTED,
    "PLAUSIBLE": Status.PLAUSIBLE,
    "UNSUPPORTED": Status.UNSUPPORTED,
    "UNCERTAIN": Status.UNCERTAIN,
}


def parse_judge(text: str) -> JudgeVote:
    """Judge verdict with confidence clamped to [0, 1]; garbage is (Uncertain, 0)."""
    try:
        data = extract_json(text)
        verdict = _VERDICTS[str(data["verdict"]).strip().upper()]
        confidence = _confidence(data.get("confidence", 0.0))
    except (MalformedOutput, KeyError, TypeError, AttributeError):
        return JudgeVote(Status.UNCERTAIN, 0.0)
    if confidence is None:
        return JudgeVote(Status.UNCERTAIN, 0.0)
    return JudgeVote(verdict, confidence)


_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")


def parse_similarity(text: str) -> Optional[float]:
    m = _NUMBER.search(text)
    return _confidence(m.group()) if m else None


def parse_entities(text: str) -> Signature:
    data = extract_json(text)
    if not isinstance(data, dict):
        raise MalformedOutput("entity extraction must be a JSON object")
    try:
        return Signature.from_json(data)
    except (KeyError, TypeError, ValueError, FormulaError) as exc:
        raise MalformedOutput(f"bad signature: {exc}") from None


def parse_bridging(text: str) -> list[BridgingAxiom]:
    data = extract_json(text)
    if not isinstance(data, list):
        raise MalformedOutput("bridging axioms must be a JSON list")
    out = []
    for item in data:
        if isinstance(item, str):
            out.append(BridgingAxiom(item))
        elif isinstance(item, dict) and isinstance(item.get("smt"), str):
            out.append(BridgingAxiom(item["smt"], str(item.get("provenance", ""))))
        else:
            raise MalformedOutput(f"malformed bridging axiom: {item!r}"[:200])
    return out
