"""Shared fixtures: a four-unit flow spec, a style palette, deterministic
HTML fragments, and scripted mock providers that drive full pipeline runs."""

import json

from docweave import docspec as ds

BERNOULLI_TOPIC = "What is Bernoulli's equation?"

PALETTE_JSON = json.dumps({
    "writing": [
        {"id": "tone", "label": "Narrative tone", "options": [
            {"id": "friendly", "label": "Friendly",
             "description": "Warm, conversational explanations."},
            {"id": "formal", "label": "Formal",
             "description": "Precise, textbook prose."},
        ]},
        {"id": "depth", "label": "Mathematical depth", "options": [
            {"id": "light", "label": "Light",
             "description": "Intuition first, minimal symbols."},
            {"id": "full", "label": "Full",
             "description": "Show the derivations."},
            {"id": "mixed", "label": "Mixed",
             "description": "Intuition with optional derivations."},
        ]},
    ],
    "interaction": [
        {"id": "visual-density", "label": "Visual density", "options": [
            {"id": "minimal", "label": "Minimal",
             "description": "One focused widget per idea."},
            {"id": "rich", "label": "Rich",
             "description": "Layered, annotated visuals."},
        ]},
    ],
})


def flow_unit(uid: str, summary: str) -> ds.KnowledgeUnit:
    return ds.KnowledgeUnit(
        id=uid,
        summary=summary,
        text_description=f"Explain {summary.lower()} with a worked example.",
        interaction=ds.InteractionSpec(
            state=[
                ds.ControlledVariable(
                    name="speed", control="slider",
                    domain=ds.ContinuousRange(lo=0, hi=20, step=1), default=5),
                ds.DerivedVariable(
                    name="pressure", derivation="p0 - 0.5 * rho * speed^2",
                    depends_on=["speed"]),
            ],
            render=["pipe cross-section", "pressure gauge"],
            transitions=[ds.Transition(
                trigger="drag the speed slider", affects=["pressure"],
                effect="gauge falls as flow speeds up")],
            constraint="pressure decreases monotonically as speed rises",
        ))


def bernoulli_spec() -> ds.DocSpec:
    return ds.DocSpec(topic=BERNOULLI_TOPIC, units=[
        flow_unit("b1-intro", "Fluids in motion"),
        flow_unit("b2-tradeoff", "The pressure and speed trade-off"),
        flow_unit("b3-venturi", "The Venturi effect"),
        flow_unit("b4-flight", "Why wings generate lift"),
    ])


def text_fragment(uid: str, summary: str) -> str:
    return f"<h2>{summary}</h2>\n<p>Section {uid} explains {summary.lower()}.</p>"


def viz_fragment(uid: str) -> str:
    safe = uid.replace("-", "_")
    return (
        f'<div class="widget">'
        f'<input type="range" min="0" max="20" value="5" id="s_{safe}">'
        f'<span id="o_{safe}">5</span>'
        f"<script>(function(){{"
        f"var s=document.getElementById('s_{safe}');"
        f"var o=document.getElementById('o_{safe}');"
        f"s.addEventListener('input',function(){{o.textContent=s.value;}});"
        f"}})();</script></div>"
    )


def full_run_script(spec: ds.DocSpec | None = None,
                    palette_json: str = PALETTE_JSON) -> dict[str, list]:
    """Mock script covering one complete plan/style/execute pass."""
    spec = spec or bernoulli_spec()
    return {
        "planner": [ds.serialize(spec)],
        "styler": [palette_json],
        "executor_text": [text_fragment(u.id, u.summary) for u in spec.units],
        "executor_viz": [viz_fragment(u.id) for u in spec.units],
    }


def write_script_jsonl(script: dict[str, list], path) -> str:
    """Dump a (string-only) mock script to the JSONL file format."""
    with open(path, "w", encoding="utf-8") as fh:
        for role, entries in script.items():
            for entry in entries:
                assert isinstance(entry, str)
                fh.write(json.dumps({"role": role, "response": entry}) + "\n")
    return str(path)
