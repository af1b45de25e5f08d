"""Document specification: the structured plan coordinating all pipeline stages.

A document spec holds a topic and an ordered list of knowledge units. Each
unit carries a one-line summary, a self-contained text description, and one
interaction specification decomposed into state / render / transitions /
constraint. The canonical interchange format is UTF-8 JSON with a fixed key
order, 2-space indentation, and a trailing newline; `serialize` and `parse`
are exact inverses on valid specs.
"""

from __future__ import annotations

import json
from typing import Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

Number = Union[int, float]
Value = Union[bool, int, float, str]

CONTROL_KINDS = (
    "slider",
    "drag_x",
    "drag_y",
    "drag_2d",
    "toggle",
    "segmented_button",
    "dropdown",
    "click_to_place",
    "hover",
    "scroll",
    "playback",
    "button",
)

ControlKind = Literal[
    "slider",
    "drag_x",
    "drag_y",
    "drag_2d",
    "toggle",
    "segmented_button",
    "dropdown",
    "click_to_place",
    "hover",
    "scroll",
    "playback",
    "button",
]


class SpecError(Exception):
    """Base class for spec-level failures."""


class MalformedInput(SpecError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"malformed input at {path}: {reason}")


class UnknownControlKind(SpecError):
    def __init__(self, path: str, token: str):
        self.path = path
        self.token = token
        super().__init__(f"unknown control kind {token!r} at {path}")


class EditError(SpecError):
    pass


class UnknownUnit(EditError):
    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"no unit with id {unit_id!r}")


class UnknownVariable(EditError):
    def __init__(self, unit_id: str, name: str):
        self.unit_id = unit_id
        self.name = name
        super().__init__(f"no variable {name!r} in unit {unit_id!r}")


class InvalidPermutation(EditError):
    pass


class NotSpecLevelOp(EditError):
    pass


class InvariantViolation(EditError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        detail = "; ".join(i.message for i in report.issues)
        super().__init__(f"edit would violate spec invariants: {detail}")


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ContinuousRange(_Model):
    type: Literal["range"] = "range"
    lo: Number
    hi: Number
    step: Number | None = None

    def contains(self, value: Value) -> bool:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        return self.lo <= value <= self.hi


class Enumeration(_Model):
    type: Literal["enum"] = "enum"
    options: list[str]

    def contains(self, value: Value) -> bool:
        return isinstance(value, str) and value in self.options


class Unbounded(_Model):
    type: Literal["unbounded"] = "unbounded"

    def contains(self, value: Value) -> bool:
        return True


Domain = Union[ContinuousRange, Enumeration, Unbounded]


class ControlledVariable(_Model):
    name: str
    kind: Literal["controlled"] = "controlled"
    control: ControlKind
    domain: Domain = Field(discriminator="type")
    default: Value


class DerivedVariable(_Model):
    name: str
    kind: Literal["derived"] = "derived"
    derivation: str
    depends_on: list[str]


class ConstantVariable(_Model):
    name: str
    kind: Literal["constant"] = "constant"
    value: Value


StateVariable = Union[ControlledVariable, DerivedVariable, ConstantVariable]


class Transition(_Model):
    trigger: str
    affects: list[str]
    effect: str


class InteractionSpec(_Model):
    state: list[StateVariable] = Field(default_factory=list)
    render: list[str] = Field(default_factory=list)
    transitions: list[Transition] = Field(default_factory=list)
    constraint: str = ""

    def variable(self, name: str) -> StateVariable | None:
        for var in self.state:
            if var.name == name:
                return var
        return None


class KnowledgeUnit(_Model):
    id: str
    summary: str
    text_description: str
    interaction: InteractionSpec


class DocSpec(_Model):
    topic: str
    units: list[KnowledgeUnit] = Field(default_factory=list)

    def unit(self, unit_id: str) -> KnowledgeUnit | None:
        for u in self.units:
            if u.id == unit_id:
                return u
        return None

    def unit_ids(self) -> list[str]:
        return [u.id for u in self.units]


# ---------------------------------------------------------------------------
# Validation


class Issue(_Model):
    code: str
    unit_id: str | None = None
    variable: str | None = None
    message: str


class ValidationReport(_Model):
    ok: bool
    issues: list[Issue]

    def render_text(self) -> str:
        if self.ok:
            return "ok"
        lines = []
        for i in self.issues:
            where = "/".join(p for p in (i.unit_id, i.variable) if p)
            prefix = f"[{i.code}] {where}: " if where else f"[{i.code}] "
            lines.append(prefix + i.message)
        return "\n".join(lines)


def _check_interaction(unit: KnowledgeUnit, issues: list[Issue]) -> None:
    spec = unit.interaction
    uid = unit.id

    if not spec.state:
        issues.append(Issue(code="NoStateVariables", unit_id=uid,
                            message="interaction declares no state variables"))
    names = [v.name for v in spec.state]
    seen: set[str] = set()
    for name in names:
        if name in seen:
            issues.append(Issue(code="DuplicateVariableName", unit_id=uid, variable=name,
                                message=f"variable name {name!r} declared more than once"))
        seen.add(name)

    for var in spec.state:
        if isinstance(var, ControlledVariable):
            dom = var.domain
            if isinstance(dom, ContinuousRange):
                if not dom.lo < dom.hi:
                    issues.append(Issue(code="InvalidRange", unit_id=uid, variable=var.name,
                                        message=f"range requires lo < hi, got [{dom.lo}, {dom.hi}]"))
                elif dom.step is not None and not 0 < dom.step <= dom.hi - dom.lo:
                    issues.append(Issue(code="InvalidStep", unit_id=uid, variable=var.name,
                                        message=f"step {dom.step} must be positive and at most {dom.hi - dom.lo}"))
            elif isinstance(dom, Enumeration):
                if len(set(dom.options)) < 2 or len(dom.options) != len(set(dom.options)):
                    issues.append(Issue(code="InvalidEnumeration", unit_id=uid, variable=var.name,
                                        message="enumeration needs at least 2 distinct options"))
            if not dom.contains(var.default):
                issues.append(Issue(code="DefaultOutOfDomain", unit_id=uid, variable=var.name,
                                    message=f"default {var.default!r} lies outside the declared domain"))
        elif isinstance(var, DerivedVariable):
            if not var.derivation.strip():
                issues.append(Issue(code="EmptyDerivation", unit_id=uid, variable=var.name,
                                    message="derived variable has an empty derivation"))
            for dep in var.depends_on:
                if dep not in seen:
                    issues.append(Issue(code="UnresolvedDependency", unit_id=uid, variable=var.name,
                                        message=f"depends_on names undeclared variable {dep!r}"))

    # cycle check over the derived-variable dependency graph
    graph = {v.name: [d for d in v.depends_on if d in seen]
             for v in spec.state if isinstance(v, DerivedVariable)}
    state = dict.fromkeys(graph, 0)  # 0 unvisited, 1 in progress, 2 done

    def visit(node: str, trail: list[str]) -> list[str] | None:
        state[node] = 1
        for dep in graph.get(node, ()):
            if dep not in graph:
                continue
            if state[dep] == 1:
                return trail + [node, dep]
            if state[dep] == 0:
                found = visit(dep, trail + [node])
                if found:
                    return found
        state[node] = 2
        return None

    for node in graph:
        if state[node] == 0:
            cycle = visit(node, [])
            if cycle:
                issues.append(Issue(code="DependencyCycle", unit_id=uid, variable=cycle[-1],
                                    message="dependency cycle: " + " -> ".join(cycle)))
                break

    if not spec.render:
        issues.append(Issue(code="NoRenderItems", unit_id=uid,
                            message="render list is empty"))
    if not spec.transitions:
        issues.append(Issue(code="NoTransitions", unit_id=uid,
                            message="transitions list is empty"))
    for idx, tr in enumerate(spec.transitions):
        for name in tr.affects:
            if name not in seen:
                issues.append(Issue(code="UnresolvedTransitionTarget", unit_id=uid, variable=name,
                                    message=f"transition {idx} affects undeclared variable {name!r}"))
    if not spec.constraint.strip():
        issues.append(Issue(code="EmptyConstraint", unit_id=uid,
                            message="constraint is empty"))


def validate(spec: DocSpec) -> ValidationReport:
    """Check every semantic invariant; violations are reported, never raised."""
    issues: list[Issue] = []
    if not spec.topic.strip():
        issues.append(Issue(code="EmptyTopic", message="topic is empty"))
    if not spec.units:
        issues.append(Issue(code="NoUnits", message="spec has no knowledge units"))

    seen_ids: set[str] = set()
    for unit in spec.units:
        if unit.id in seen_ids:
            issues.append(Issue(code="DuplicateUnitId", unit_id=unit.id,
                                message=f"unit id {unit.id!r} appears more than once"))
        seen_ids.add(unit.id)
        if not unit.summary.strip():
            issues.append(Issue(code="EmptySummary", unit_id=unit.id,
                                message="summary is empty"))
        if not unit.text_description.strip():
            issues.append(Issue(code="EmptyTextDescription", unit_id=unit.id,
                                message="text description is empty"))
        _check_interaction(unit, issues)

    return ValidationReport(ok=not issues, issues=issues)


# ---------------------------------------------------------------------------
# Canonical serialization


def serialize(spec: DocSpec) -> str:
    """Render the canonical interchange text: fixed key order, 2-space indent,
    optional fields omitted when absent, trailing newline."""
    data = spec.model_dump(mode="json", exclude_none=True)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _error_path(err: dict) -> str:
    return "/".join(str(p) for p in err["loc"]) or "<root>"


def parse(text: str) -> DocSpec:
    """Inverse of `serialize`; raises on the first offending path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput("<root>", f"not valid JSON: {exc}") from exc
    return parse_obj(data)


def parse_obj(data: object) -> DocSpec:
    try:
        return DocSpec.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = first["loc"]
        if loc and loc[-1] == "control" and first["type"] in ("literal_error", "enum"):
            raise UnknownControlKind(_error_path(first), str(first.get("input"))) from exc
        raise MalformedInput(_error_path(first), first["msg"]) from exc


def load(path: str) -> DocSpec:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# Edit operations


class ReorderUnits(_Model):
    op: Literal["reorder_units"] = "reorder_units"
    permutation: list[int]  # 1-based positions into the current order


class AddUnit(_Model):
    op: Literal["add_unit"] = "add_unit"
    index: int
    unit: KnowledgeUnit


class RemoveUnit(_Model):
    op: Literal["remove_unit"] = "remove_unit"
    id: str


class UpdateSummary(_Model):
    op: Literal["update_summary"] = "update_summary"
    id: str
    text: str


class UpdateTextDescription(_Model):
    op: Literal["update_text_description"] = "update_text_description"
    id: str
    text: str


class UpdateConstraint(_Model):
    op: Literal["update_constraint"] = "update_constraint"
    id: str
    text: str


class SetDomain(_Model):
    op: Literal["set_domain"] = "set_domain"
    id: str
    var: str
    domain: Domain = Field(discriminator="type")


class SetDefault(_Model):
    op: Literal["set_default"] = "set_default"
    id: str
    var: str
    value: Value


class SetControlKind(_Model):
    op: Literal["set_control_kind"] = "set_control_kind"
    id: str
    var: str
    control: ControlKind


class ReplaceSectionText(_Model):
    op: Literal["replace_section_text"] = "replace_section_text"
    id: str
    html: str


class RegenerateViz(_Model):
    op: Literal["regenerate_viz"] = "regenerate_viz"
    id: str
    extra_instruction: str = ""


SpecEditOp = Union[
    ReorderUnits, AddUnit, RemoveUnit, UpdateSummary, UpdateTextDescription,
    UpdateConstraint, SetDomain, SetDefault, SetControlKind,
]
DocEditOp = Union[ReplaceSectionText, RegenerateViz]
EditOp = Union[SpecEditOp, DocEditOp]

DOC_LEVEL_OPS = ("replace_section_text", "regenerate_viz")


class _EditOpEnvelope(_Model):
    root: EditOp = Field(discriminator="op")


def parse_edit_op(data: object) -> EditOp:
    try:
        return _EditOpEnvelope.model_validate({"root": data}).root
    except ValidationError as exc:
        first = exc.errors()[0]
        raise MalformedInput(_error_path(first), first["msg"]) from exc


def is_spec_level(op: EditOp) -> bool:
    return op.op not in DOC_LEVEL_OPS


def _require_unit(spec: DocSpec, unit_id: str) -> KnowledgeUnit:
    unit = spec.unit(unit_id)
    if unit is None:
        raise UnknownUnit(unit_id)
    return unit


def _require_controlled(unit: KnowledgeUnit, name: str) -> ControlledVariable:
    var = unit.interaction.variable(name)
    if var is None:
        raise UnknownVariable(unit.id, name)
    if not isinstance(var, ControlledVariable):
        raise UnknownVariable(unit.id, name)
    return var


def apply_edit(spec: DocSpec, op: EditOp) -> DocSpec:
    """Apply one spec-level edit, returning a fresh spec; the input is never
    mutated and an edit that would break an invariant is rejected whole."""
    if not is_spec_level(op):
        raise NotSpecLevelOp(f"{op.op} targets a generated document, not a spec")

    out = spec.model_copy(deep=True)

    if isinstance(op, ReorderUnits):
        n = len(out.units)
        if sorted(op.permutation) != list(range(1, n + 1)):
            raise InvalidPermutation(
                f"permutation {op.permutation} is not a rearrangement of 1..{n}")
        out.units = [out.units[i - 1] for i in op.permutation]
    elif isinstance(op, AddUnit):
        if not 0 <= op.index <= len(out.units):
            raise EditError(f"insert index {op.index} out of range")
        out.units.insert(op.index, op.unit.model_copy(deep=True))
    elif isinstance(op, RemoveUnit):
        _require_unit(out, op.id)
        out.units = [u for u in out.units if u.id != op.id]
    elif isinstance(op, UpdateSummary):
        _require_unit(out, op.id).summary = op.text
    elif isinstance(op, UpdateTextDescription):
        _require_unit(out, op.id).text_description = op.text
    elif isinstance(op, UpdateConstraint):
        _require_unit(out, op.id).interaction.constraint = op.text
    elif isinstance(op, SetDomain):
        _require_controlled(_require_unit(out, op.id), op.var).domain = op.domain
    elif isinstance(op, SetDefault):
        _require_controlled(_require_unit(out, op.id), op.var).default = op.value
    elif isinstance(op, SetControlKind):
        _require_controlled(_require_unit(out, op.id), op.var).control = op.control
    else:  # pragma: no cover - exhaustive over spec-level ops
        raise NotSpecLevelOp(f"unhandled op {op.op}")

    report = validate(out)
    if not report.ok:
        raise InvariantViolation(report)
    return out


def apply_edits(spec: DocSpec, ops: list[EditOp]) -> DocSpec:
    for op in ops:
        spec = apply_edit(spec, op)
    return spec
