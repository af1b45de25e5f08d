"""Rubric-based judge scoring through the gateway's structured-output path.

Judges get one repair round-trip: an unparseable or out-of-range reply is
sent back once with the error, and a second failure raises."""

from __future__ import annotations

import json
import re
import string
from importlib import resources

from ..gateway import (
    CompletionRequest,
    Gateway,
    SchemaValidationError,
    StructuredOutputFailed,
    register_schema,
)
from .browser import InteractiveElement


class JudgeFailed(Exception):
    pass


class JudgeOutOfRange(Exception):
    pass


_OUT_OF_RANGE = "score out of range"


def _judge_score_schema(text: str) -> int:
    raw = text.strip()
    score = None
    match = re.search(r"\{.*\}", raw, re.DOTALL)
    if match:
        try:
            obj = json.loads(match.group(0))
            if isinstance(obj, dict) and isinstance(obj.get("score"), (int, float)):
                score = obj["score"]
        except json.JSONDecodeError:
            pass
    if score is None:
        bare = re.fullmatch(r"-?\d+", raw)
        if bare:
            score = int(bare.group(0))
    if score is None:
        raise SchemaValidationError('reply with {"score": N}, N an integer 1-5')
    if score != int(score) or not 1 <= score <= 5:
        raise SchemaValidationError(f"{_OUT_OF_RANGE}: {score} is not an integer in [1, 5]")
    return int(score)


register_schema("judge_score", _judge_score_schema)


def _template(name: str) -> string.Template:
    text = resources.files("docweave").joinpath(f"prompts/{name}.txt").read_text("utf-8")
    return string.Template(text)


def _ask_judge(gateway: Gateway, user: str) -> tuple[int, int]:
    req = CompletionRequest(role_tag="judge",
                           system="You score educational documents against a rubric.",
                           user=user, schema="judge_score")
    try:
        result = gateway.complete_structured(req, max_repairs=1)
    except StructuredOutputFailed as exc:
        if _OUT_OF_RANGE in exc.last_error:
            raise JudgeOutOfRange(exc.last_error) from exc
        raise JudgeFailed(exc.last_error) from exc
    return result.parsed, result.usage.attempts


def judge_content_richness(gateway: Gateway, text: str, topic: str) -> int:
    """Breadth-and-depth rubric over the extracted prose only."""
    user = _template("judge_cr").substitute(topic=topic, text=text)
    score, _ = _ask_judge(gateway, user)
    return score


def render_inventory(elements: list[InteractiveElement]) -> str:
    lines = []
    for el in elements:
        label = el.label or "(unlabeled)"
        context = el.context or "(no nearby text)"
        lines.append(f"- {el.kind} {label!r}, near: {context}")
    return "\n".join(lines)


def judge_interaction_design(gateway: Gateway,
                             elements: list[InteractiveElement]) -> int:
    """Purposefulness rubric over the element inventory with nearby text.
    An empty inventory short-circuits to the scale minimum without a call."""
    if not elements:
        return 1
    user = _template("judge_id").substitute(inventory=render_inventory(elements))
    score, _ = _ask_judge(gateway, user)
    return score
