"""Built-in example specs: one per interaction type, plus the pi ratio demo.

These are small single-unit specs used as golden fixtures for the interchange
format, the validator, and the taxonomy rules. `write_gallery` emits them as
canonical files.
"""

from __future__ import annotations

import os

from . import docspec as ds
from .docspec import (
    ConstantVariable,
    ContinuousRange,
    ControlledVariable,
    DerivedVariable,
    DocSpec,
    Enumeration,
    InteractionSpec,
    KnowledgeUnit,
    Transition,
    Unbounded,
)

PI_CONSTRAINT = "ratio ≈ 3.14159 regardless of r"


def pi_spec() -> DocSpec:
    """Slider-driven circle demo: circumference over diameter stays constant."""
    return DocSpec(
        topic="What is pi?",
        units=[KnowledgeUnit(
            id="pi-ratio",
            summary="The ratio of a circle's circumference to its diameter is constant.",
            text_description=(
                "Explain that every circle, regardless of size, has the same "
                "circumference-to-diameter ratio, and that this constant is pi. "
                "The reader should leave able to state the definition of pi as C/D."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="r", control="slider",
                                       domain=ContinuousRange(lo=0.5, hi=5), default=1),
                    DerivedVariable(name="C", derivation="2*pi*r", depends_on=["r"]),
                    DerivedVariable(name="D", derivation="2*r", depends_on=["r"]),
                    DerivedVariable(name="ratio", derivation="C/D", depends_on=["C", "D"]),
                ],
                render=[
                    "A circle whose size reflects r",
                    "Labels showing C, D, and ratio",
                ],
                transitions=[Transition(
                    trigger="Dragging the slider",
                    affects=["r"],
                    effect="changes r; C, D, ratio update automatically")],
                constraint=PI_CONSTRAINT,
            ),
        )],
    )


def lorenz_spec() -> DocSpec:
    return DocSpec(
        topic="The Lorenz attractor",
        units=[KnowledgeUnit(
            id="lorenz",
            summary="Chaotic trajectories of the Lorenz system depend sensitively on parameters.",
            text_description=(
                "Introduce the Lorenz system of three coupled differential equations "
                "and explain why small parameter changes reshape the attractor."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="sigma", control="slider",
                                       domain=ContinuousRange(lo=1, hi=30), default=10),
                    ControlledVariable(name="rho", control="slider",
                                       domain=ContinuousRange(lo=10, hi=60), default=28),
                    ConstantVariable(name="beta", value=2.667),
                    DerivedVariable(
                        name="trajectory",
                        derivation=("numerical integration of dx/dt = sigma*(y-x), "
                                    "dy/dt = x*(rho-z) - y, dz/dt = x*y - beta*z"),
                        depends_on=["sigma", "rho", "beta"]),
                ],
                render=[
                    "A continuously growing 3D phase-space trajectory projected onto a 2D canvas",
                    "The trail fades over time to emphasize recent motion",
                    "A slow auto-rotation of the view around the vertical axis",
                    "Two sliders for sigma and rho displayed below the canvas",
                ],
                transitions=[
                    Transition(trigger="Adjusting the sigma slider",
                               affects=["sigma", "trajectory"],
                               effect="resets the trajectory and restarts integration from the same initial point"),
                    Transition(trigger="Adjusting the rho slider",
                               affects=["rho", "trajectory"],
                               effect="resets the trajectory, deforming the attractor or collapsing it into a stable orbit"),
                ],
                constraint=("For classical values (sigma=10, rho=28, beta=8/3) the trajectory "
                            "never repeats and draws a distinctive butterfly shape, demonstrating "
                            "sensitive dependence on initial conditions."),
            ),
        )],
    )


def optics_spec() -> DocSpec:
    return DocSpec(
        topic="Geometric optics and the thin lens equation",
        units=[KnowledgeUnit(
            id="lens",
            summary="Dragging the object or focal points shows the thin lens equation live.",
            text_description=(
                "Explain image formation by a convex lens and how object distance and "
                "focal length determine the image position, size, and orientation."),
            interaction=InteractionSpec(
                state=[
                    ConstantVariable(name="lens_x", value=400),
                    ConstantVariable(name="canvas_height", value=400),
                    ControlledVariable(name="object_x", control="drag_x",
                                       domain=ContinuousRange(lo=20, hi=390), default=120),
                    ControlledVariable(name="object_y", control="drag_y",
                                       domain=ContinuousRange(lo=0, hi=400), default=150),
                    ControlledVariable(name="f", control="drag_x",
                                       domain=ContinuousRange(lo=40, hi=300), default=100),
                    DerivedVariable(name="u", derivation="lens_x - object_x",
                                    depends_on=["lens_x", "object_x"]),
                    DerivedVariable(name="v", derivation="(u * f) / (u - f)",
                                    depends_on=["u", "f"]),
                    DerivedVariable(name="M", derivation="v / u", depends_on=["v", "u"]),
                    DerivedVariable(
                        name="image_type",
                        derivation="if v > 0: Real Inverted; if v < 0: Virtual Upright; if v = infinity: Undefined",
                        depends_on=["v"]),
                ],
                render=[
                    "A central convex lens whose thickness scales with focal length",
                    "An orange draggable object arrow on the left of the lens",
                    "Two green draggable focal points F and F' on the optical axis",
                    "Three principal rays drawn from the object tip through the lens",
                    "A colored image arrow on the right (green for real, blue for virtual)",
                    "An instrument dashboard showing live values of f, u, v, and M",
                    "A status tag indicating image type and orientation",
                ],
                transitions=[
                    Transition(trigger="Dragging the object arrow horizontally",
                               affects=["object_x", "u"],
                               effect="changes u and updates all derived optical values"),
                    Transition(trigger="Dragging the object arrow vertically",
                               affects=["object_y"],
                               effect="changes the object height and redraws the ray diagram"),
                    Transition(trigger="Dragging a focal point F or F'",
                               affects=["f"],
                               effect="changes f, reshaping the lens and all derived values simultaneously"),
                ],
                constraint=("The thin lens equation 1/u + 1/v = 1/f is always satisfied. "
                            "When u < f the image distance v becomes negative (virtual image); "
                            "when u = f the image forms at infinity."),
            ),
        )],
    )


def voronoi_spec() -> DocSpec:
    return DocSpec(
        topic="Voronoi tessellation",
        units=[KnowledgeUnit(
            id="voronoi",
            summary="Hovering reveals the Voronoi cell and nearest-neighbor envelope of the cursor.",
            text_description=(
                "Explain Voronoi partitioning: every point belongs to the region of "
                "its nearest seed. The reader should grasp the nearest-neighbor definition."),
            interaction=InteractionSpec(
                state=[
                    ConstantVariable(name="seeds",
                                     value="15 seed points at random positions drifting with slow random velocity"),
                    ControlledVariable(name="mouse_pos", control="hover",
                                       domain=Unbounded(), default="canvas center"),
                    DerivedVariable(name="nearest",
                                    derivation="argmin_k d(mouse_pos, seeds[k])",
                                    depends_on=["mouse_pos", "seeds"]),
                    DerivedVariable(name="min_dist",
                                    derivation="d(mouse_pos, seeds[nearest])",
                                    depends_on=["mouse_pos", "seeds", "nearest"]),
                    DerivedVariable(
                        name="cell_region",
                        derivation="all pixels closest to seeds[nearest] within 150px of mouse_pos",
                        depends_on=["seeds", "nearest", "mouse_pos"]),
                ],
                render=[
                    "An animated canvas of 15 slowly drifting seed points on a dark background",
                    "On hover: the hovered Voronoi cell illuminated with a purple radial gradient",
                    "On hover: a dashed gold line connecting the cursor to its nearest seed",
                    "On hover: a transparent circle of radius min_dist visualizing the nearest-neighbor envelope",
                    "The nearest seed highlighted in gold; all others remain purple",
                ],
                transitions=[
                    Transition(trigger="Moving the mouse over the canvas",
                               affects=["mouse_pos"],
                               effect="updates mouse_pos continuously"),
                    Transition(trigger="Each animation frame",
                               affects=["nearest", "min_dist", "cell_region"],
                               effect="recalculates the nearest seed and updates the cell, line, and envelope in real time"),
                ],
                constraint=("The illuminated region always corresponds exactly to the Voronoi cell "
                            "of the nearest seed: every point within it is closer to that seed than "
                            "to any other."),
            ),
        )],
    )


def neural_spec() -> DocSpec:
    return DocSpec(
        topic="Neural network forward propagation",
        units=[KnowledgeUnit(
            id="forward-prop",
            summary="Clicking places hidden neurons and animates signal propagation through them.",
            text_description=(
                "Explain how signals flow forward through a network layer by layer "
                "and why hidden neurons add non-linearity."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="hidden_nodes", control="click_to_place",
                                       domain=Unbounded(), default="empty list"),
                    DerivedVariable(name="weights", derivation="random initialization",
                                    depends_on=["hidden_nodes"]),
                    DerivedVariable(name="activations",
                                    derivation="forward pass with sigmoid activation",
                                    depends_on=["hidden_nodes", "weights"]),
                    DerivedVariable(name="output_val",
                                    derivation="average of output neuron activations",
                                    depends_on=["activations"]),
                ],
                render=[
                    "Three fixed red input nodes (x1, x2, x3) on the left",
                    "Two fixed blue output nodes (y1, y2) on the right",
                    "User-placed yellow hidden nodes in the central region",
                    "Directed arrows connecting all layers; animate green (input to hidden) then orange (hidden to output) during the forward pass",
                    "Activation values displayed on each node",
                    "An output activation progress bar and percentage readout",
                    "A 'Send Signal' button and a 'Clear' button",
                ],
                transitions=[
                    Transition(trigger="Clicking in the central canvas zone",
                               affects=["hidden_nodes", "activations"],
                               effect="places a new hidden neuron and immediately triggers an animated forward pass"),
                    Transition(trigger="Pressing 'Send Signal'",
                               affects=["weights", "activations"],
                               effect="replays the forward pass with newly randomized weights"),
                    Transition(trigger="Pressing 'Clear'",
                               affects=["hidden_nodes", "output_val"],
                               effect="removes all hidden nodes and resets the output bar to 50%"),
                ],
                constraint=("Adding more hidden neurons generally introduces more non-linearity; "
                            "the output activation always falls in (0, 1) because of the sigmoid, "
                            "regardless of network topology."),
            ),
        )],
    )


def entropy_spec() -> DocSpec:
    return DocSpec(
        topic="Thermodynamic entropy and mixing",
        units=[KnowledgeUnit(
            id="entropy-mixing",
            summary="Scrolling removes a partition and lets two particle gases mix irreversibly.",
            text_description=(
                "Explain entropy as a measure of mixing and why removing a constraint "
                "drives the system toward disorder."),
            interaction=InteractionSpec(
                state=[
                    ConstantVariable(name="canvas_height", value=500),
                    ControlledVariable(name="scroll_progress", control="scroll",
                                       domain=ContinuousRange(lo=0, hi=1), default=0),
                    DerivedVariable(name="partition_y",
                                    derivation="scroll_progress * canvas_height",
                                    depends_on=["scroll_progress", "canvas_height"]),
                    ConstantVariable(name="particles",
                                     value="150 red + 150 blue bouncing particles"),
                    DerivedVariable(
                        name="entropy_S",
                        derivation="fraction of particles that have crossed to the other side times 100",
                        depends_on=["particles"]),
                ],
                render=[
                    "A dark split canvas with 300 bouncing particles: red on the left, blue on the right",
                    "A central vertical wall separating the two halves, present only from partition_y downward",
                    "A live entropy counter (S = ...) displayed in red in the top-left corner",
                    "A scroll-progress fill bar on the left edge",
                ],
                transitions=[
                    Transition(trigger="Scrolling downward",
                               affects=["scroll_progress", "partition_y"],
                               effect="raises partition_y, shortening the wall from the top so particles can mix"),
                    Transition(trigger="Scrolling upward",
                               affects=["scroll_progress", "partition_y"],
                               effect="lowers partition_y, re-blocking particle passage"),
                ],
                constraint=("As the wall is removed the particles irreversibly mix and entropy S "
                            "increases monotonically: delta S >= 0 maps directly to the scroll "
                            "interaction, visualizing time's arrow."),
            ),
        )],
    )


def mobius_spec() -> DocSpec:
    return DocSpec(
        topic="The Mobius strip",
        units=[KnowledgeUnit(
            id="mobius",
            summary="Dragging rotates a 3D Mobius strip freely in space.",
            text_description=(
                "Explain single-sidedness: a path along the surface returns to its "
                "start mirrored. The reader should understand non-orientability."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="rotX", control="drag_y",
                                       domain=ContinuousRange(lo=-3.14, hi=3.14), default=0.5),
                    ControlledVariable(name="rotY", control="drag_x",
                                       domain=ContinuousRange(lo=-3.14, hi=3.14), default=-0.5),
                    DerivedVariable(
                        name="surface",
                        derivation=("parametric mesh x(u,v) = (R + v*cos(u/2))*cos(u), "
                                    "y(u,v) = v*sin(u/2), z(u,v) = (R + v*cos(u/2))*sin(u)"),
                        depends_on=["rotX", "rotY"]),
                ],
                render=[
                    "A 3D polygon mesh of the Mobius strip rendered with the painter's algorithm",
                    "Faces colored with a teal-to-sky-blue gradient mapped to the u parameter",
                    "Depth shading simulating a diffuse light source",
                    "Numeric overlays showing the current rotX and rotY viewing angles",
                ],
                transitions=[
                    Transition(trigger="Clicking and dragging horizontally on the canvas",
                               affects=["rotY"],
                               effect="rotates the strip around the vertical axis"),
                    Transition(trigger="Clicking and dragging vertically",
                               affects=["rotX"],
                               effect="tilts the strip forward or backward"),
                    Transition(trigger="Releasing the mouse",
                               affects=["rotX", "rotY"],
                               effect="locks the current orientation"),
                ],
                constraint=("No matter how the strip is rotated, a continuous path along its "
                            "surface always returns to the starting point in a mirrored "
                            "orientation, demonstrating single-sidedness."),
            ),
        )],
    )


def orbitals_spec() -> DocSpec:
    return DocSpec(
        topic="Quantum electron orbitals",
        units=[KnowledgeUnit(
            id="orbitals",
            summary="Switching orbital states redraws the electron probability cloud.",
            text_description=(
                "Explain that electron positions are probability distributions whose "
                "shapes depend on the quantum numbers of the orbital."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="orbital_state", control="segmented_button",
                                       domain=Enumeration(options=["1s", "2p", "3d"]),
                                       default="1s"),
                    DerivedVariable(
                        name="wavefunction",
                        derivation="psi(r, theta) = radial_part(n, l) * angular_part(l, m)",
                        depends_on=["orbital_state"]),
                    DerivedVariable(
                        name="density_cloud",
                        derivation="Monte Carlo sampling, accept point (x, y) with probability proportional to |psi(x, y)|^2",
                        depends_on=["wavefunction"]),
                ],
                render=[
                    "A 2D canvas with coordinate axes and a nucleus dot at the origin",
                    "Points progressively sampled and plotted, accumulating into a probability density cloud",
                    "A wavefunction equation display that updates to reflect the active orbital state",
                    "A segmented button control with options 1s, 2p, and 3d",
                ],
                transitions=[
                    Transition(trigger="Clicking a segment button",
                               affects=["orbital_state"],
                               effect="sets orbital_state to the selected orbital"),
                    Transition(trigger="Switching state",
                               affects=["density_cloud"],
                               effect="clears all existing sample points and triggers a new Monte Carlo sampling run"),
                ],
                constraint=("Each orbital state produces a distinct spatial density pattern: 1s is "
                            "spherically symmetric, 2p is a dumbbell with a nodal plane, and 3d "
                            "forms a four-lobed clover, matching theoretical predictions."),
            ),
        )],
    )


def fourier_spec() -> DocSpec:
    return DocSpec(
        topic="Fourier series epicycles",
        units=[KnowledgeUnit(
            id="fourier",
            summary="Playing rotating epicycles reconstructs a square wave from harmonics.",
            text_description=(
                "Explain Fourier's theorem: periodic signals decompose into sinusoids, "
                "and adding harmonics sharpens the reconstruction."),
            interaction=InteractionSpec(
                state=[
                    ControlledVariable(name="time", control="playback",
                                       domain=Unbounded(), default=0),
                    ControlledVariable(name="is_playing", control="toggle",
                                       domain=Unbounded(), default=True),
                    ControlledVariable(name="n_harmonics", control="slider",
                                       domain=ContinuousRange(lo=1, hi=15, step=2), default=5),
                    DerivedVariable(name="wave",
                                    derivation="last 500 y-values of the epicycle tip",
                                    depends_on=["time", "n_harmonics"]),
                ],
                render=[
                    "A chain of rotating circles (epicycles), each at a frequency proportional to its harmonic index",
                    "A dot tracing the tip of the outermost epicycle",
                    "A reconstructed square wave drawn on the right by recording the tip's y-position over time",
                    "A dashed line connecting the epicycle tip to the leading edge of the wave",
                    "A Play/Pause button and a harmonic count slider",
                ],
                transitions=[
                    Transition(trigger="Pressing Play/Pause",
                               affects=["is_playing"],
                               effect="starts or freezes the rotation of all epicycles"),
                    Transition(trigger="Dragging the harmonic slider",
                               affects=["n_harmonics", "wave"],
                               effect="adds or removes outer epicycles in odd increments, immediately reshaping the output wave"),
                ],
                constraint=("As n_harmonics increases toward infinity the reconstructed wave "
                            "converges to a perfect square wave: any periodic signal decomposes "
                            "into sinusoids."),
            ),
        )],
    )


# Expected primary type per gallery entry, keyed by builder name.
GALLERY: dict[str, tuple] = {
    "pi": (pi_spec, "ParameterExploration"),
    "lorenz": (lorenz_spec, "ParameterExploration"),
    "lens": (optics_spec, "DirectManipulation"),
    "voronoi": (voronoi_spec, "Inspection"),
    "forward-prop": (neural_spec, "FreeformConstruction"),
    "entropy-mixing": (entropy_spec, "ScrollDrivenNarrative"),
    "mobius": (mobius_spec, "SpatialNavigation"),
    "orbitals": (orbitals_spec, "StateSwitching"),
    "fourier": (fourier_spec, "TemporalControl"),
}


def write_gallery(out_dir: str) -> list[str]:
    """Write every gallery spec as a canonical file; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, (builder, _primary) in GALLERY.items():
        path = os.path.join(out_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(ds.serialize(builder()))
        paths.append(path)
    return paths
