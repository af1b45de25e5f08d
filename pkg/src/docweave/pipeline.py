"""Four-agent generation pipeline: planning, styling, two-step execution per
unit, assembly, evaluator feedback, targeted repair, and chat-based editing.

The text step sees the unit's text description, the writing instructions, and
bounded context from earlier sections; the visualization step sees the unit's
interaction specification and the interaction instructions. The two prompts
never mix, so each step can be regenerated independently.
"""

from __future__ import annotations

import html as html_mod
import json
import re
import string
import time
from importlib import resources
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import docspec as ds
from . import htmlcheck
from .docspec import DocSpec, KnowledgeUnit
from .gateway import (
    CompletionRequest,
    CompletionResult,
    Gateway,
    SchemaValidationError,
    StructuredOutputFailed,
    register_schema,
)


class PipelineError(Exception):
    stage: str = "pipeline"


class EmptyTopic(PipelineError):
    stage = "plan"


class PlanFailed(PipelineError):
    stage = "plan"


class StyleFailed(PipelineError):
    stage = "style"


class SelectionIncomplete(PipelineError):
    stage = "style"


class UnknownOption(PipelineError):
    stage = "style"


class GenerationFailed(PipelineError):
    stage = "execute"


class MissingSection(PipelineError):
    stage = "assemble"

    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"no section for unit {unit_id!r}")


class DuplicateSection(PipelineError):
    stage = "assemble"

    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"duplicate section for unit {unit_id!r}")


class OrderMismatch(PipelineError):
    stage = "assemble"


class RepairExhausted(PipelineError):
    stage = "repair"


class EditInterpretationFailed(PipelineError):
    stage = "chat_edit"


class InapplicableOps(PipelineError):
    stage = "chat_edit"

    def __init__(self, details: list[str]):
        self.details = details
        super().__init__("; ".join(details))


class StageError(PipelineError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage}: {cause}")


# ---------------------------------------------------------------------------
# Style types


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StyleOption(_Model):
    id: str
    label: str
    description: str


class StyleDimension(_Model):
    id: str
    label: str
    options: list[StyleOption]


class StylePalette(_Model):
    writing: list[StyleDimension]
    interaction: list[StyleDimension]

    def dimensions(self) -> list[tuple[str, StyleDimension]]:
        return ([("writing", d) for d in self.writing]
                + [("interaction", d) for d in self.interaction])


class OptionChoice(_Model):
    mode: Literal["option"] = "option"
    option_id: str


class AutoChoice(_Model):
    mode: Literal["auto"] = "auto"


class CustomChoice(_Model):
    mode: Literal["custom"] = "custom"
    text: str


Choice = Union[OptionChoice, AutoChoice, CustomChoice]


class StyleSelection(_Model):
    choices: dict[str, Choice]  # dimension id -> choice


class StyleInstructions(_Model):
    writing_instructions: str
    interaction_instructions: str


def palette_invariant_error(palette: StylePalette) -> str | None:
    if not palette.writing or not palette.interaction:
        return "palette needs at least one writing and one interaction dimension"
    ids = [d.id for _, d in palette.dimensions()]
    if len(ids) != len(set(ids)):
        return "dimension ids must be unique across the palette"
    for _, dim in palette.dimensions():
        if not 2 <= len(dim.options) <= 3:
            return (f"dimension {dim.id!r} has {len(dim.options)} options; "
                    "each dimension needs 2 to 3")
        opt_ids = [o.id for o in dim.options]
        if len(opt_ids) != len(set(opt_ids)):
            return f"dimension {dim.id!r} has duplicate option ids"
    return None


def all_auto_selection(palette: StylePalette) -> StyleSelection:
    return StyleSelection(choices={d.id: AutoChoice() for _, d in palette.dimensions()})


def compile_styles(palette: StylePalette, selection: StyleSelection) -> StyleInstructions:
    """Deterministically turn palette choices into prose instructions."""
    missing = [d.id for _, d in palette.dimensions() if d.id not in selection.choices]
    if missing:
        raise SelectionIncomplete(f"selection missing dimensions: {', '.join(missing)}")
    parts = {"writing": [], "interaction": []}
    for category, dim in palette.dimensions():
        choice = selection.choices[dim.id]
        if isinstance(choice, OptionChoice):
            opt = next((o for o in dim.options if o.id == choice.option_id), None)
            if opt is None:
                raise UnknownOption(
                    f"dimension {dim.id!r} has no option {choice.option_id!r}")
            parts[category].append(f"{dim.label}: {opt.description}")
        elif isinstance(choice, CustomChoice):
            if not choice.text.strip():
                raise SelectionIncomplete(f"custom text for {dim.id!r} is empty")
            parts[category].append(f"{dim.label}: {choice.text}")
        else:
            parts[category].append(
                f"Choose an appropriate {dim.label} yourself.")
    return StyleInstructions(
        writing_instructions="\n".join(parts["writing"]),
        interaction_instructions="\n".join(parts["interaction"]))


# ---------------------------------------------------------------------------
# Document artifacts


class SectionTimings(_Model):
    text_seconds: float = 0.0
    viz_seconds: float = 0.0


class SectionChars(_Model):
    text_chars: int = 0
    viz_chars: int = 0


class SectionArtifact(_Model):
    unit_id: str
    text_html: str
    viz_html: str
    timings: SectionTimings = Field(default_factory=SectionTimings)
    chars: SectionChars = Field(default_factory=SectionChars)


class GeneratedDocument(_Model):
    spec_ref: DocSpec
    sections: list[SectionArtifact]
    html: str
    total_seconds: float
    total_chars: int
    style: StyleInstructions | None = None


class FeedbackIssue(_Model):
    unit_id: str | None = None
    kind: Literal["StructureInvalid", "UnitMissing", "SectionInvalid"]
    detail: str


class Retrigger(_Model):
    unit_id: str
    step: Literal["text", "viz"]


class EvaluatorFeedback(_Model):
    ok: bool
    issues: list[FeedbackIssue]
    retrigger: list[Retrigger]


# ---------------------------------------------------------------------------
# Structured-output schemas


def strip_fences(text: str) -> str:
    match = re.search(r"```(?:json|html)?\s*(.*?)```", text, re.DOTALL)
    return match.group(1).strip() if match else text.strip()


def _docspec_schema(text: str) -> DocSpec:
    try:
        spec = ds.parse(strip_fences(text))
    except ds.SpecError as exc:
        raise SchemaValidationError(str(exc)) from exc
    report = ds.validate(spec)
    if not report.ok:
        raise SchemaValidationError("spec violates invariants: " + report.render_text())
    return spec


def _palette_schema(text: str) -> StylePalette:
    try:
        palette = StylePalette.model_validate_json(strip_fences(text))
    except ValidationError as exc:
        raise SchemaValidationError(str(exc.errors()[0]["msg"])) from exc
    error = palette_invariant_error(palette)
    if error:
        raise SchemaValidationError(error)
    return palette


def _edit_ops_schema(text: str) -> list[ds.EditOp]:
    try:
        data = json.loads(strip_fences(text))
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaValidationError("expected a JSON array of operations")
    try:
        return [ds.parse_edit_op(item) for item in data]
    except ds.SpecError as exc:
        raise SchemaValidationError(str(exc)) from exc


register_schema("docspec", _docspec_schema)
register_schema("style_palette", _palette_schema)
register_schema("edit_ops", _edit_ops_schema)


# ---------------------------------------------------------------------------
# Prompt plumbing


def _template(name: str) -> string.Template:
    text = resources.files("docweave").joinpath(f"prompts/{name}.txt").read_text("utf-8")
    return string.Template(text)


def _domain_text(dom: ds.Domain) -> str:
    if isinstance(dom, ds.ContinuousRange):
        step = f", step {dom.step}" if dom.step is not None else ""
        return f"range [{dom.lo}, {dom.hi}]{step}"
    if isinstance(dom, ds.Enumeration):
        return "one of " + ", ".join(dom.options)
    return "unbounded"


def srtc_block(spec: ds.InteractionSpec) -> str:
    """Readable rendering of an interaction spec for the viz prompt; the
    constraint line carries the spec's constraint text verbatim."""
    lines = ["State:"]
    for var in spec.state:
        if isinstance(var, ds.ControlledVariable):
            lines.append(f"- {var.name}: {var.control} control, "
                         f"{_domain_text(var.domain)}, default {var.default}")
        elif isinstance(var, ds.DerivedVariable):
            deps = ", ".join(var.depends_on)
            lines.append(f"- {var.name}: derived = {var.derivation} (depends on {deps})")
        else:
            lines.append(f"- {var.name}: constant {var.value}")
    lines.append("Render:")
    lines.extend(f"- {item}" for item in spec.render)
    lines.append("Transitions:")
    for tr in spec.transitions:
        lines.append(f"- {tr.trigger} -> affects {', '.join(tr.affects)}: {tr.effect}")
    lines.append(f"Constraint: {spec.constraint}")
    return "\n".join(lines)


_SYSTEM = {
    "planner": "You plan interactive educational documents as structured specs.",
    "styler": "You propose style palettes for educational documents.",
    "executor_text": "You write educational prose as clean HTML fragments.",
    "executor_viz": "You build self-contained interactive HTML visualizations.",
    "editor": "You translate editing requests into structured operations.",
}


# ---------------------------------------------------------------------------
# Pipeline


class Pipeline:
    def __init__(self, gateway: Gateway, *, max_rounds: int = 2,
                 prior_context_chars: int = 500, seed: int | None = None):
        self.gateway = gateway
        self.max_rounds = max_rounds
        self.prior_context_chars = prior_context_chars
        self.seed = seed
        self.transcript: list[dict] = []

    def _record(self, stage: str, result: CompletionResult, unit_id: str | None = None):
        entry = {
            "stage": stage,
            "attempts": result.usage.attempts,
            "output_chars": result.usage.output_chars,
            "seconds": result.usage.latency,
        }
        if unit_id:
            entry["unit_id"] = unit_id
        self.transcript.append(entry)

    def _request(self, role: str, user: str, schema: str | None = None) -> CompletionRequest:
        return CompletionRequest(role_tag=role, system=_SYSTEM[role], user=user,
                                 schema=schema, seed=self.seed)

    # -- agents --------------------------------------------------------------

    def plan(self, topic: str) -> DocSpec:
        if not topic.strip():
            raise EmptyTopic("topic is empty")
        user = _template("planner").substitute(topic=topic)
        try:
            result = self.gateway.complete_structured(
                self._request("planner", user, schema="docspec"))
        except StructuredOutputFailed as exc:
            raise PlanFailed(str(exc)) from exc
        self._record("plan", result)
        return result.parsed

    def propose_styles(self, spec: DocSpec) -> StylePalette:
        report = ds.validate(spec)
        if not report.ok:
            raise StyleFailed("spec is invalid: " + report.render_text())
        summaries = "\n".join(f"- {u.summary}" for u in spec.units)
        user = _template("styler").substitute(topic=spec.topic,
                                              unit_summaries=summaries)
        try:
            result = self.gateway.complete_structured(
                self._request("styler", user, schema="style_palette"))
        except StructuredOutputFailed as exc:
            raise StyleFailed(str(exc)) from exc
        self._record("style", result)
        return result.parsed

    def generate_text(self, unit: KnowledgeUnit, prior_context: str,
                      writing_instructions: str) -> tuple[str, CompletionResult]:
        user = _template("text_step").substitute(
            summary=unit.summary,
            text_description=unit.text_description,
            writing_instructions=writing_instructions,
            prior_context=prior_context or "(this is the first section)")

        def check(text: str) -> str | None:
            fragment = strip_fences(text)
            if not htmlcheck.well_formed(fragment):
                return "the HTML fragment has unbalanced tags"
            if htmlcheck.contains_script(fragment):
                return "the text step must not emit script elements"
            return None

        try:
            result = self.gateway.complete_checked(
                self._request("executor_text", user), check)
        except StructuredOutputFailed as exc:
            raise GenerationFailed(f"text step for {unit.id}: {exc}") from exc
        self._record("text", result, unit.id)
        return strip_fences(result.text), result

    def generate_viz(self, unit: KnowledgeUnit, interaction_instructions: str,
                     extra_instruction: str = "") -> tuple[str, CompletionResult]:
        user = _template("viz_step").substitute(
            srtc_block=srtc_block(unit.interaction),
            interaction_instructions=interaction_instructions,
            extra_instruction=(extra_instruction + "\n") if extra_instruction else "")

        def check(text: str) -> str | None:
            fragment = strip_fences(text)
            if not htmlcheck.well_formed(fragment):
                return "the HTML fragment has unbalanced tags"
            refs = htmlcheck.external_references(fragment)
            if refs:
                return ("the fragment must be self-contained; remove external "
                        "references: " + ", ".join(refs))
            return None

        try:
            result = self.gateway.complete_checked(
                self._request("executor_viz", user), check)
        except StructuredOutputFailed as exc:
            raise GenerationFailed(f"viz step for {unit.id}: {exc}") from exc
        self._record("viz", result, unit.id)
        return strip_fences(result.text), result

    # -- assembly and checking ----------------------------------------------

    def assemble(self, spec: DocSpec, sections: list[SectionArtifact],
                 total_seconds: float | None = None,
                 style: StyleInstructions | None = None) -> GeneratedDocument:
        by_id: dict[str, SectionArtifact] = {}
        for section in sections:
            if section.unit_id in by_id:
                raise DuplicateSection(section.unit_id)
            by_id[section.unit_id] = section
        for unit in spec.units:
            if unit.id not in by_id:
                raise MissingSection(unit.id)
        extra = set(by_id) - set(spec.unit_ids())
        if extra:
            raise OrderMismatch(f"sections for unknown units: {sorted(extra)}")

        ordered = [by_id[u.id] for u in spec.units]
        parts = [
            "<!DOCTYPE html>",
            '<html lang="en">',
            "<head>",
            '<meta charset="utf-8">',
            f"<title>{html_mod.escape(spec.topic)}</title>",
            "</head>",
            "<body>",
            f"<h1>{html_mod.escape(spec.topic)}</h1>",
        ]
        for section in ordered:
            parts.append(f'<section id="unit-{html_mod.escape(section.unit_id, quote=True)}">')
            parts.append('<div class="unit-text">')
            parts.append(section.text_html)
            parts.append("</div>")
            parts.append('<div class="unit-viz">')
            parts.append(section.viz_html)
            parts.append("</div>")
            parts.append("</section>")
        parts.append("</body>")
        parts.append("</html>")
        page = "\n".join(parts)
        if total_seconds is None:
            total_seconds = sum(s.timings.text_seconds + s.timings.viz_seconds
                                for s in ordered)
        return GeneratedDocument(spec_ref=spec, sections=ordered, html=page,
                                 total_seconds=total_seconds,
                                 total_chars=len(page), style=style)

    def check_document(self, doc: GeneratedDocument,
                       spec: DocSpec | None = None) -> EvaluatorFeedback:
        spec = spec or doc.spec_ref
        issues: list[FeedbackIssue] = []
        retrigger: list[Retrigger] = []

        def flag(unit_id: str, step: str, kind: str, detail: str):
            issues.append(FeedbackIssue(unit_id=unit_id, kind=kind, detail=detail))
            pair = Retrigger(unit_id=unit_id, step=step)
            if pair not in retrigger:
                retrigger.append(pair)

        if not htmlcheck.well_formed(doc.html):
            issues.append(FeedbackIssue(kind="StructureInvalid",
                                        detail="assembled page has unbalanced tags"))

        by_id = {s.unit_id: s for s in doc.sections}
        for unit in spec.units:
            section = by_id.get(unit.id)
            if section is None:
                flag(unit.id, "text", "UnitMissing", "no section generated")
                flag(unit.id, "viz", "UnitMissing", "no section generated")
                continue
            if f'id="unit-{unit.id}"' not in doc.html:
                flag(unit.id, "text", "UnitMissing", "section anchor absent from page")
            if not section.text_html.strip():
                flag(unit.id, "text", "UnitMissing", "text fragment is empty")
            elif not htmlcheck.well_formed(section.text_html):
                flag(unit.id, "text", "SectionInvalid", "text fragment has unbalanced tags")
            if not section.viz_html.strip():
                flag(unit.id, "viz", "UnitMissing", "viz fragment is empty")
            elif not htmlcheck.well_formed(section.viz_html):
                flag(unit.id, "viz", "SectionInvalid", "viz fragment has unbalanced tags")

        if issues and not retrigger:
            # page-level structural damage: rebuild everything
            retrigger = [Retrigger(unit_id=u.id, step="text") for u in spec.units]
        return EvaluatorFeedback(ok=not issues, issues=issues, retrigger=retrigger)

    def _prior_context(self, spec: DocSpec, sections: dict[str, SectionArtifact],
                       upto_unit: str) -> str:
        parts = []
        for unit in spec.units:
            if unit.id == upto_unit:
                break
            parts.append(f"Section '{unit.summary}'")
            section = sections.get(unit.id)
            if section and section.text_html:
                excerpt = htmlcheck.extract_main_text(section.text_html)
                parts.append(excerpt[: self.prior_context_chars])
        return "\n".join(parts)

    def repair(self, doc: GeneratedDocument, feedback: EvaluatorFeedback,
               instructions: StyleInstructions) -> GeneratedDocument:
        if feedback.ok:
            return doc
        spec = doc.spec_ref
        for _ in range(self.max_rounds):
            sections = {s.unit_id: s for s in doc.sections}
            for item in feedback.retrigger:
                unit = spec.unit(item.unit_id)
                if unit is None:
                    continue
                current = sections.get(item.unit_id) or SectionArtifact(
                    unit_id=item.unit_id, text_html="", viz_html="")
                updated = current.model_copy(deep=True)
                if item.step == "text":
                    context = self._prior_context(spec, sections, unit.id)
                    fragment, result = self.generate_text(
                        unit, context, instructions.writing_instructions)
                    updated.text_html = fragment
                    updated.timings.text_seconds = result.usage.latency
                    updated.chars.text_chars = len(fragment)
                else:
                    fragment, result = self.generate_viz(
                        unit, instructions.interaction_instructions)
                    updated.viz_html = fragment
                    updated.timings.viz_seconds = result.usage.latency
                    updated.chars.viz_chars = len(fragment)
                sections[item.unit_id] = updated
            doc = self.assemble(spec, [sections[u.id] for u in spec.units
                                       if u.id in sections],
                                style=doc.style)
            feedback = self.check_document(doc)
            if feedback.ok:
                return doc
        raise RepairExhausted(
            f"document still failing after {self.max_rounds} repair rounds: "
            + "; ".join(i.detail for i in feedback.issues))

    # -- chat editing --------------------------------------------------------

    def chat_edit(self, message: str, target: Literal["spec", "doc"], *,
                  spec: DocSpec | None = None,
                  document: GeneratedDocument | None = None) -> list[ds.EditOp]:
        if target == "spec":
            if spec is None:
                raise EditInterpretationFailed("no spec in context")
            context = ds.serialize(spec)
        else:
            if document is None:
                raise EditInterpretationFailed("no document in context")
            outline = [
                {"unit_id": s.unit_id, "text_chars": len(s.text_html),
                 "viz_chars": len(s.viz_html)}
                for s in document.sections
            ]
            context = json.dumps({"topic": document.spec_ref.topic,
                                  "sections": outline}, indent=2)
        user = _template("chat_edit").substitute(
            target=target, message=message, context=context)
        try:
            result = self.gateway.complete_structured(
                self._request("editor", user, schema="edit_ops"))
        except StructuredOutputFailed as exc:
            raise EditInterpretationFailed(str(exc)) from exc
        self._record("chat_edit", result)
        ops: list[ds.EditOp] = result.parsed

        problems = []
        if target == "spec":
            trial = spec
            for op in ops:
                if not ds.is_spec_level(op):
                    problems.append(f"{op.op} is a document-level operation")
                    continue
                try:
                    trial = ds.apply_edit(trial, op)
                except ds.EditError as exc:
                    problems.append(f"{op.op}: {exc}")
        else:
            known = {s.unit_id for s in document.sections}
            for op in ops:
                if ds.is_spec_level(op):
                    problems.append(f"{op.op} is a spec-level operation")
                elif op.id not in known:
                    problems.append(f"{op.op}: no section {op.id!r}")
        if problems:
            raise InapplicableOps(problems)
        return ops

    def apply_doc_edits(self, doc: GeneratedDocument,
                        ops: list[ds.EditOp]) -> GeneratedDocument:
        sections = {s.unit_id: s.model_copy(deep=True) for s in doc.sections}
        instructions = doc.style or StyleInstructions(
            writing_instructions="", interaction_instructions="")
        for op in ops:
            if isinstance(op, ds.ReplaceSectionText):
                if op.id not in sections:
                    raise InapplicableOps([f"no section {op.id!r}"])
                if not htmlcheck.well_formed(op.html) or htmlcheck.contains_script(op.html):
                    raise InapplicableOps(
                        [f"replacement text for {op.id!r} must be script-free, balanced HTML"])
                sections[op.id].text_html = op.html
                sections[op.id].chars.text_chars = len(op.html)
            elif isinstance(op, ds.RegenerateViz):
                unit = doc.spec_ref.unit(op.id)
                if unit is None or op.id not in sections:
                    raise InapplicableOps([f"no section {op.id!r}"])
                fragment, result = self.generate_viz(
                    unit, instructions.interaction_instructions,
                    extra_instruction=op.extra_instruction)
                sections[op.id].viz_html = fragment
                sections[op.id].timings.viz_seconds = result.usage.latency
                sections[op.id].chars.viz_chars = len(fragment)
            else:
                raise InapplicableOps([f"{op.op} is a spec-level operation"])
        return self.assemble(doc.spec_ref,
                             [sections[u.id] for u in doc.spec_ref.units],
                             style=doc.style)

    # -- end to end ----------------------------------------------------------

    def generate_document(self, spec: DocSpec, instructions: StyleInstructions,
                          progress=None) -> GeneratedDocument:
        """Two-step generation of every unit, assembly, check, and repair.
        `progress(unit_id=..., step=..., status=...)` is called around each
        per-unit generation step when given."""
        start = time.monotonic()

        def notify(unit_id, step, status):
            if progress:
                progress(unit_id=unit_id, step=step, status=status)

        sections: dict[str, SectionArtifact] = {}
        for unit in spec.units:
            notify(unit.id, "text", "started")
            context = self._prior_context(spec, sections, unit.id)
            text_html, text_result = self.generate_text(
                unit, context, instructions.writing_instructions)
            notify(unit.id, "text", "finished")
            notify(unit.id, "viz", "started")
            viz_html, viz_result = self.generate_viz(
                unit, instructions.interaction_instructions)
            notify(unit.id, "viz", "finished")
            sections[unit.id] = SectionArtifact(
                unit_id=unit.id, text_html=text_html, viz_html=viz_html,
                timings=SectionTimings(text_seconds=text_result.usage.latency,
                                       viz_seconds=viz_result.usage.latency),
                chars=SectionChars(text_chars=len(text_html),
                                   viz_chars=len(viz_html)))

        doc = self.assemble(spec, [sections[u.id] for u in spec.units],
                            style=instructions)
        feedback = self.check_document(doc)
        if not feedback.ok:
            doc = self.repair(doc, feedback, instructions)
        doc.total_seconds = time.monotonic() - start
        return doc

    def run(self, topic: str, selection: StyleSelection | None = None,
            progress=None) -> GeneratedDocument:
        """Full pipeline from topic to checked document."""
        start = time.monotonic()

        def staged(stage, fn, *args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except Exception as exc:
                raise StageError(stage, exc) from exc

        spec = staged("plan", self.plan, topic)
        palette = staged("style", self.propose_styles, spec)
        if selection is None:
            selection = all_auto_selection(palette)
        instructions = staged("style", compile_styles, palette, selection)
        doc = staged("execute", self.generate_document, spec, instructions,
                     progress)
        doc.total_seconds = time.monotonic() - start
        return doc
