"""Prompt templates per stage. Placeholders are written ``[SLOT]``."""

from __future__ import annotations

import re

STAGES = (
    "generate",
    "decompose",
    "classify",
    "formalize",
    "verbalize",
    "similarity",
    "judge",
    "bridging-axioms",
    "entity-extract",
)

# slots that identify a request for scripted replay; the rest is presentation
SALIENT = {
    "generate": ("QUERY", "PREVIOUS_ANSWER"),
    "decompose": ("ANSWER", "FORMAT_REMINDER"),
    "classify": ("CLAIM",),
    "formalize": ("CLAIM", "SAMPLE"),
    "verbalize": ("FORMULA",),
    "similarity": ("TEXT_A", "TEXT_B"),
    "judge": ("CLAIM", "JUDGE_ID"),
    "bridging-axioms": ("SOFT_CLAIMS",),
    "entity-extract": ("CONTEXT", "QUERY"),
}

TYPE_GLOSSARY = """\
- MATHEMATICAL: arithmetic, counting, equations or numeric comparisons
- LOGICAL: deductions, quantifiers, conditionals, set membership
- TEMPORAL: ordering of events, dates, schedules, durations
- PROBABILISTIC: likelihoods, chances, statistical statements
- COMMONSENSE: everyday world knowledge that no premise states
- VAGUE: subjective or underspecified statements"""

TEMPLATES: dict[str, tuple[str, str]] = {
    "generate": (
        "You answer reasoning questions carefully and state your conclusion plainly.",
        "Context:\n[CONTEXT]\n\nQuestion:\n[QUERY]\n\n"
        "Your previous answer (empty on the first attempt):\n[PREVIOUS_ANSWER]\n\n"
        "Verifier feedback on that answer (empty on the first attempt):\n[FEEDBACK]\n\n"
        "Give your answer followed by a short justification.",
    ),
    "decompose": (
        "You split answers into atomic, independently checkable claims.",
        "Break the answer below into atomic claims. Each claim must state exactly one "
        "fact or inference, make sense without the others, and avoid pronouns.\n\n"
        "Tag each claim with one type:\n" + TYPE_GLOSSARY + "\n\n"
        "Reply with a JSON list only, for example\n"
        '[{"text": "Alan is a guest", "type": "LOGICAL"}]\n\n'
        "Answer:\n[ANSWER]\n[FORMAT_REMINDER]",
    ),
    "classify": (
        "You label claims by the kind of reasoning needed to check them.",
        "Pick the single best type for the claim.\n" + TYPE_GLOSSARY + "\n\n"
        'Claim: [CLAIM]\n\nReply with JSON: {"type": "...", "confidence": 0.0-1.0}',
    ),
    "formalize": (
        "You translate natural-language statements into SMT-LIB2 for an SMT solver.",
        "Translate the claim into SMT-LIB2 over the given vocabulary.\n"
        "Rules:\n"
        "- declare any sort or symbol you need that the vocabulary lacks\n"
        "- assume (set-logic ALL); do not emit (check-sat)\n"
        "- model unclear relations as uninterpreted functions rather than guessing\n"
        "- put only the SMT-LIB2 between <smt> and </smt>\n\n"
        "Vocabulary:\n[SIGNATURE]\n\nContext:\n[CONTEXT]\n\nClaim:\n[CLAIM]\n\n"
        "Sample id: [SAMPLE]",
    ),
    "verbalize": (
        "You explain formulas in plain English.",
        "State in one English sentence what this SMT-LIB2 formula says.\n\n[FORMULA]",
    ),
    "similarity": (
        "You rate how closely two sentences agree in meaning.",
        "Rate the semantic similarity of A and B from 0 (unrelated) to 1 "
        "(same meaning). Reply with the number only.\n\nA: [TEXT_A]\nB: [TEXT_B]",
    ),
    "judge": (
        "You assess claims that cannot be checked formally.",
        "Judge whether the claim is supported given the context and general knowledge.\n"
        "Verdicts: Supported, Plausible, Unsupported, Uncertain.\n\n"
        "Context:\n[CONTEXT]\n\nClaim:\n[CLAIM]\n\nJudge id: [JUDGE_ID]\n\n"
        'Reply with JSON: {"verdict": "...", "confidence": 0.0-1.0}',
    ),
    "bridging-axioms": (
        "You connect informal claims to a formal vocabulary.",
        "Each soft claim below is represented by a Boolean variable. Where a claim "
        "has formal consequences, write an implication from its variable to those "
        "consequences, using only the vocabulary given.\n\n"
        "Vocabulary:\n[SIGNATURE]\n\nContext:\n[CONTEXT]\n\nSoft claims:\n[SOFT_CLAIMS]\n\n"
        'Reply with a JSON list: [{"smt": "(=> b_0 ...)", "provenance": "why"}]',
    ),
    "entity-extract": (
        "You identify the objects and relations a reasoning problem talks about.",
        "List the sorts, entities, functions and predicates needed to formalize the "
        "problem.\n\nContext:\n[CONTEXT]\n\nQuestion:\n[QUERY]\n\n"
        'Reply with JSON: {"sorts": [...], "entities": [{"name": "...", "sort": "..."}], '
        '"functions": [{"name": "...", "args": [...], "result": "..."}], '
        '"predicates": [{"name": "...", "args": [...]}]}',
    ),
}

_SLOT = re.compile(r"\[([A-Z_]+)\]")


def placeholders(stage: str) -> set[str]:
    system, user = TEMPLATES[stage]
    return set(_SLOT.findall(system)) | set(_SLOT.findall(user))


def fill(stage: str, slots: dict[str, str]) -> tuple[str, str]:
    """Substitute every placeholder; the slot set must match exactly."""
    want = placeholders(stage)
    if set(slots) != want:
        raise ValueError(f"stage {stage} needs slots {sorted(want)}, got {sorted(slots)}")
    system, user = TEMPLATES[stage]
    sub = lambda m: slots[m.group(1)]  # noqa: E731
    return _SLOT.sub(sub, system), _SLOT.sub(sub, user)
