"""Eight-type interaction taxonomy and rule-based classification.

Classification works from control kinds alone, with one lexical refinement:
a drag control whose variable name or transition text mentions rotation,
zoom, pan, view, or camera counts as spatial navigation rather than direct
manipulation. The primary type is picked by a fixed priority order in which
rarer, more document-defining mechanics dominate.
"""

from __future__ import annotations

import re
from collections import Counter
from enum import Enum

from pydantic import BaseModel

from .docspec import ControlledVariable, InteractionSpec


class InteractionType(str, Enum):
    STATE_SWITCHING = "StateSwitching"
    PARAMETER_EXPLORATION = "ParameterExploration"
    FREEFORM_CONSTRUCTION = "FreeformConstruction"
    DIRECT_MANIPULATION = "DirectManipulation"
    TEMPORAL_CONTROL = "TemporalControl"
    INSPECTION = "Inspection"
    SPATIAL_NAVIGATION = "SpatialNavigation"
    SCROLL_DRIVEN_NARRATIVE = "ScrollDrivenNarrative"


# Highest first; decides the primary label when several types apply.
PRIORITY = (
    InteractionType.SCROLL_DRIVEN_NARRATIVE,
    InteractionType.TEMPORAL_CONTROL,
    InteractionType.FREEFORM_CONSTRUCTION,
    InteractionType.DIRECT_MANIPULATION,
    InteractionType.SPATIAL_NAVIGATION,
    InteractionType.STATE_SWITCHING,
    InteractionType.PARAMETER_EXPLORATION,
    InteractionType.INSPECTION,
)

_KIND_MAP = {
    "slider": InteractionType.PARAMETER_EXPLORATION,
    "toggle": InteractionType.STATE_SWITCHING,
    "segmented_button": InteractionType.STATE_SWITCHING,
    "dropdown": InteractionType.STATE_SWITCHING,
    "button": InteractionType.STATE_SWITCHING,
    "click_to_place": InteractionType.FREEFORM_CONSTRUCTION,
    "hover": InteractionType.INSPECTION,
    "scroll": InteractionType.SCROLL_DRIVEN_NARRATIVE,
    "playback": InteractionType.TEMPORAL_CONTROL,
}

_DRAG_KINDS = ("drag_x", "drag_y", "drag_2d")

_SPATIAL_RE = re.compile(r"rot|zoom|pan\b|view|camera", re.IGNORECASE)


class NoControlledVariables(Exception):
    pass


class Classification(BaseModel):
    types: set[InteractionType]
    primary: InteractionType


def _drag_is_spatial(var: ControlledVariable, spec: InteractionSpec) -> bool:
    if _SPATIAL_RE.search(var.name):
        return True
    for tr in spec.transitions:
        if var.name in tr.affects and (
                _SPATIAL_RE.search(tr.trigger) or _SPATIAL_RE.search(tr.effect)):
            return True
    return False


def classify(spec: InteractionSpec) -> Classification:
    types: set[InteractionType] = set()
    for var in spec.state:
        if not isinstance(var, ControlledVariable):
            continue
        if var.control in _DRAG_KINDS:
            if _drag_is_spatial(var, spec):
                types.add(InteractionType.SPATIAL_NAVIGATION)
            else:
                types.add(InteractionType.DIRECT_MANIPULATION)
        else:
            types.add(_KIND_MAP[var.control])
    if not types:
        raise NoControlledVariables(
            "interaction spec declares no user-controllable variables")
    primary = next(t for t in PRIORITY if t in types)
    return Classification(types=types, primary=primary)


def distribution(classifications: list[Classification]) -> dict[InteractionType, int]:
    counts = Counter(c.primary for c in classifications)
    return {t: counts.get(t, 0) for t in InteractionType}


def render_distribution(counts: dict[InteractionType, int]) -> str:
    """Text table: type, count, percent, one row per type, descending count."""
    total = sum(counts.values())
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].value))
    width = max(len(t.value) for t in InteractionType)
    lines = [f"{'Type':<{width}}  Count  Percent"]
    for t, n in rows:
        pct = (100.0 * n / total) if total else 0.0
        lines.append(f"{t.value:<{width}}  {n:5d}  {pct:6.1f}%")
    lines.append(f"{'Total':<{width}}  {total:5d}  {100.0 if total else 0.0:6.1f}%")
    return "\n".join(lines)
