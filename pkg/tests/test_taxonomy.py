import pytest
from hypothesis import given, strategies as st

from docweave import taxonomy as tx
from docweave.docspec import (
    ContinuousRange,
    ControlledVariable,
    InteractionSpec,
    Transition,
    Unbounded,
)
from docweave.gallery import GALLERY

T = tx.InteractionType


def controlled(name, control, **kw):
    kw.setdefault("domain", ContinuousRange(lo=0, hi=1))
    kw.setdefault("default", 0)
    return ControlledVariable(name=name, control=control, **kw)


def spec_with(*variables, transitions=()):
    return InteractionSpec(state=list(variables),
                           transitions=list(transitions),
                           render=["r"], constraint="c")


def test_slider_is_parameter_exploration():
    cls = tx.classify(spec_with(controlled("r", "slider")))
    assert cls.types == {T.PARAMETER_EXPLORATION}
    assert cls.primary == T.PARAMETER_EXPLORATION


@pytest.mark.parametrize("kind,expected", [
    ("toggle", T.STATE_SWITCHING),
    ("segmented_button", T.STATE_SWITCHING),
    ("dropdown", T.STATE_SWITCHING),
    ("button", T.STATE_SWITCHING),
    ("click_to_place", T.FREEFORM_CONSTRUCTION),
    ("hover", T.INSPECTION),
    ("scroll", T.SCROLL_DRIVEN_NARRATIVE),
    ("playback", T.TEMPORAL_CONTROL),
])
def test_kind_mapping(kind, expected):
    var = controlled("x", kind, domain=Unbounded(), default="a")
    assert tx.classify(spec_with(var)).primary == expected


def test_plain_drag_is_direct_manipulation():
    cls = tx.classify(spec_with(controlled("object_x", "drag_x")))
    assert cls.primary == T.DIRECT_MANIPULATION


@pytest.mark.parametrize("name", [
    "rotation_angle", "zoom_level", "pan", "view_angle", "camera_yaw", "Rotation",
])
def test_spatial_drag_by_variable_name(name):
    cls = tx.classify(spec_with(controlled(name, "drag_2d")))
    assert cls.primary == T.SPATIAL_NAVIGATION


def test_pan_requires_word_boundary():
    # "panel_offset" must not trip the pan rule
    cls = tx.classify(spec_with(controlled("panel_offset", "drag_x")))
    assert cls.primary == T.DIRECT_MANIPULATION


def test_spatial_drag_by_transition_text():
    tr = Transition(trigger="drag on canvas", affects=["theta"],
                    effect="rotates the camera around the surface")
    cls = tx.classify(spec_with(controlled("theta", "drag_2d"),
                                transitions=[tr]))
    assert cls.primary == T.SPATIAL_NAVIGATION


def test_transition_text_only_counts_for_affected_variable():
    tr = Transition(trigger="drag", affects=["other"],
                    effect="rotates the view")
    cls = tx.classify(spec_with(controlled("pos", "drag_x"),
                                controlled("other", "slider"),
                                transitions=[tr]))
    assert T.DIRECT_MANIPULATION in cls.types


def test_priority_temporal_beats_parameter():
    cls = tx.classify(spec_with(
        controlled("t", "playback", domain=Unbounded(), default=0),
        controlled("n", "slider")))
    assert cls.types == {T.TEMPORAL_CONTROL, T.PARAMETER_EXPLORATION}
    assert cls.primary == T.TEMPORAL_CONTROL


def test_priority_scroll_beats_everything():
    cls = tx.classify(spec_with(
        controlled("progress", "scroll", domain=Unbounded(), default=0),
        controlled("t", "playback", domain=Unbounded(), default=0),
        controlled("place", "click_to_place", domain=Unbounded(), default=""),
        controlled("n", "slider")))
    assert cls.primary == T.SCROLL_DRIVEN_NARRATIVE


def test_priority_full_order():
    assert list(tx.PRIORITY) == [
        T.SCROLL_DRIVEN_NARRATIVE, T.TEMPORAL_CONTROL, T.FREEFORM_CONSTRUCTION,
        T.DIRECT_MANIPULATION, T.SPATIAL_NAVIGATION, T.STATE_SWITCHING,
        T.PARAMETER_EXPLORATION, T.INSPECTION,
    ]


def test_no_controlled_variables_raises():
    with pytest.raises(tx.NoControlledVariables):
        tx.classify(InteractionSpec(render=["r"], constraint="c"))


@pytest.mark.parametrize("name", sorted(GALLERY))
def test_gallery_primary_labels(name):
    builder, expected = GALLERY[name]
    spec = builder()
    got = {tx.classify(u.interaction).primary for u in spec.units}
    assert got == {T(expected)}


def test_distribution_counts_primary_only():
    classes = [tx.classify(spec_with(controlled("r", "slider"))),
               tx.classify(spec_with(
                   controlled("t", "playback", domain=Unbounded(), default=0),
                   controlled("n", "slider")))]
    counts = tx.distribution(classes)
    assert counts[T.PARAMETER_EXPLORATION] == 1
    assert counts[T.TEMPORAL_CONTROL] == 1
    assert sum(counts.values()) == 2
    assert set(counts) == set(T)


def test_render_distribution_table():
    counts = {t: 0 for t in T}
    counts[T.PARAMETER_EXPLORATION] = 3
    counts[T.INSPECTION] = 1
    text = tx.render_distribution(counts)
    lines = text.splitlines()
    assert lines[1].startswith("ParameterExploration")
    assert "75.0%" in lines[1]
    assert lines[-1].startswith("Total")
    assert "  4  " in lines[-1].replace("    ", "  ")


KINDS = st.sampled_from([k for k in tx._KIND_MAP] + list(tx._DRAG_KINDS))


@given(st.lists(KINDS, min_size=1, max_size=6))
def test_primary_always_highest_priority_member(kinds):
    variables = [controlled(f"v{i}", k, domain=Unbounded(), default=0)
                 for i, k in enumerate(kinds)]
    cls = tx.classify(spec_with(*variables))
    ranked = [t for t in tx.PRIORITY if t in cls.types]
    assert cls.primary == ranked[0]
