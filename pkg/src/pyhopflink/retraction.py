"""Stage-wise retraction of oriented round Hopf links onto Y ≅ SO(3).

Stages, each an endpoint map on links:

- X₀ ``center_midpoint``: translate the arc midpoint to (1/2, 0, 0)
- X₁ ``orthogonalize``: rotate both discs about the arc line to θ = π/2
- X₂ ``equalize_radii``: grow the smaller circle about its own arc endpoint
- X₃ ``normalize_radius``: homothety about the arc midpoint to radius 1
- X₄ ``center_arc_endpoints``: slide the centers onto the arc endpoints

A link in Y is determined by its frame ``[n₁ | v | n₂]`` with ``v = p₂ − p₁``.
The deck group ℤ/2×ℤ/2 of orientation/label changes acts on frames from the
right; lifting through SU(2) and canonicalizing over the lifted deck group
gives a point of S³/ℚ8.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from pyhopflink.errors import (
    DegenerateError,
    InputError,
    NotClosedError,
    NotInYError,
    PostconditionFailedError,
)
from pyhopflink.quat import (
    ONE,
    Quaternion,
    QuaternionSubgroup,
    Rotation3,
    UnitQuaternion,
    axis_angle_rotation,
    generate_subgroup,
    lift_path,
    lift_rotation,
    orbit_and_canonical,
    require_rotation,
)
from pyhopflink.roundlink import (
    OrientedRoundHopfLink,
    RigidMotion,
    RoundCircle,
    Vector3,
    arc_of_intersection,
    as_vec3,
    basepoint_link,
    dihedral_angle,
    orient_positively,
)

logger = logging.getLogger(__name__)

MIDPOINT: Vector3 = np.array([0.5, 0.0, 0.0])
Y_TOL = 1e-9
ARC_TOL = 1e-8
CLOSURE_TOL = 1e-6

Frame = Rotation3
"""Rotation with columns ``(n₁, v, n₂)``."""


class DeckElement(enum.Enum):
    """Elements of the deck group ℤ/2×ℤ/2."""

    ID = "id"
    ALPHA = "alpha"
    S = "s"
    ALPHA_S = "alpha_s"

    def __mul__(self, other: DeckElement) -> DeckElement:
        bits = _DECK_BITS[self] ^ _DECK_BITS[other]
        return _DECK_FROM_BITS[bits]


_DECK_BITS = {DeckElement.ID: 0, DeckElement.ALPHA: 1, DeckElement.S: 2, DeckElement.ALPHA_S: 3}
_DECK_FROM_BITS = {v: k for k, v in _DECK_BITS.items()}

_DECK_MATRICES: dict[DeckElement, Rotation3] = {
    DeckElement.ID: np.eye(3),
    DeckElement.ALPHA: np.diag([-1.0, 1.0, -1.0]),
    DeckElement.S: np.array([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]]),
    DeckElement.ALPHA_S: np.array([[0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]]),
}


def deck_matrix(g: DeckElement) -> Rotation3:
    """Right-action matrix of *g* on frames: ``frame_of(g·L) = frame_of(L) @ deck_matrix(g)``."""
    return _DECK_MATRICES[g].copy()


@functools.cache
def deck_subgroup() -> QuaternionSubgroup:
    """The lifts ``{±1, ±j, ±(i+k)/√2, ±(i−k)/√2}`` of the deck matrices."""
    return generate_subgroup(lift_rotation(m)[0] for m in _DECK_MATRICES.values())


@dataclass(frozen=True, slots=True)
class PrismPoint:
    """Canonical representative of a ℚ8-orbit of unit quaternions."""

    quaternion: UnitQuaternion

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.quaternion.as_tuple()


@dataclass(frozen=True, slots=True)
class FiberCoordinates:
    """Coordinates of a link in ℝ⁹ × SO(3), one block per retraction stage."""

    translation: tuple[float, float, float]
    dihedral: float
    radius_difference: float
    common_radius: float
    endpoint_offset: tuple[float, float, float]
    frame: Frame

    def as_vector(self) -> tuple[float, ...]:
        return (
            *self.translation,
            self.dihedral,
            self.radius_difference,
            self.common_radius,
            *self.endpoint_offset,
        )


# ---------------------------------------------------------------------------
# Deck action
# ---------------------------------------------------------------------------


def g_act(g: DeckElement, link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """α reverses both orientations; s exchanges the labels."""
    first, second = link.first, link.second
    if g in (DeckElement.ALPHA, DeckElement.ALPHA_S):
        first, second = first.reversed(), second.reversed()
    if g in (DeckElement.S, DeckElement.ALPHA_S):
        first, second = second, first
    return OrientedRoundHopfLink(first, second)


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def _homothety(c: RoundCircle, center: Vector3, k: float) -> RoundCircle:
    return RoundCircle(as_vec3(center + k * (c.p - center)), c.radius * k, c.normal)


def _translate(c: RoundCircle, t: Vector3) -> RoundCircle:
    return RoundCircle(as_vec3(c.p + t), c.radius, c.normal)


def center_midpoint(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Translate *link* so its arc midpoint is (1/2, 0, 0)."""
    arc = arc_of_intersection(link)
    return RigidMotion.translate(MIDPOINT - np.array(arc.midpoint)).apply_link(link)


def orthogonalize(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Rotate the discs by ∓δ/2 about the arc line so that θ = π/2.

    δ = sign(φ)·π/2 − φ, with φ the signed angle from n₁ to n₂ about the
    arc direction.

    The arc is fixed pointwise; radii and the arc midpoint do not change.

    Raises
    ------
    DegenerateError
        If θ is within 1e-9 of 0 or π.
    """
    arc = arc_of_intersection(link)
    ell = arc.direction
    n1, n2 = link.first.n, link.second.n
    phi = math.atan2(float(np.cross(n1, n2) @ ell), float(n1 @ n2))
    if abs(phi) <= Y_TOL or math.pi - abs(phi) <= Y_TOL:
        raise DegenerateError(f"Dihedral angle {abs(phi):.3g} too close to 0 or π")
    delta = math.copysign(math.pi / 2, phi) - phi
    if abs(delta) == 0.0:
        return link
    m = np.array(arc.midpoint)
    turn_first = RigidMotion.rotate_about(axis_angle_rotation(ell, -delta / 2), m)
    turn_second = RigidMotion.rotate_about(axis_angle_rotation(ell, delta / 2), m)
    return OrientedRoundHopfLink(
        turn_first.apply_circle(link.first), turn_second.apply_circle(link.second)
    )


def _check_arc(before: OrientedRoundHopfLink, after: OrientedRoundHopfLink, stage: str) -> None:
    a, b = arc_of_intersection(before), arc_of_intersection(after)
    dev = max(
        float(np.max(np.abs(np.array(a.first) - np.array(b.first)))),
        float(np.max(np.abs(np.array(a.second) - np.array(b.second)))),
    )
    if dev > ARC_TOL:
        raise DegenerateError(f"{stage} moved the arc of intersection by {dev:.3g}")


def equalize_radii(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Grow the smaller circle to the larger radius about its own arc endpoint.

    The first circle passes through the arc's ``second`` endpoint and the
    second circle through its ``first`` endpoint; each scales about that
    point, so planes and the arc stay put.

    Raises
    ------
    DegenerateError
        If the arc moves by more than 1e-8.
    """
    r1, r2 = link.first.radius, link.second.radius
    if r1 == r2:
        return link
    arc = arc_of_intersection(link)
    if r1 < r2:
        out = OrientedRoundHopfLink(
            _homothety(link.first, np.array(arc.second), r2 / r1), link.second
        )
    else:
        out = OrientedRoundHopfLink(
            link.first, _homothety(link.second, np.array(arc.first), r1 / r2)
        )
    _check_arc(link, out, "equalize_radii")
    return out


def normalize_radius(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Homothety about the arc midpoint taking the common radius to 1.

    Planes, midpoint, θ and the arc line are preserved; the arc itself is
    scaled by ``1/r``.

    Raises
    ------
    DegenerateError
        If the two radii differ by more than 1e-9.
    """
    r1, r2 = link.first.radius, link.second.radius
    if abs(r1 - r2) > Y_TOL * max(1.0, r1):
        raise DegenerateError(f"Radii must agree before normalizing, got {r1} and {r2}")
    if r1 == 1.0 and r2 == 1.0:
        return link
    m = np.array(arc_of_intersection(link).midpoint)
    return OrientedRoundHopfLink(
        RoundCircle(as_vec3(m + (link.first.p - m) / r1), 1.0, link.first.normal),
        RoundCircle(as_vec3(m + (link.second.p - m) / r2), 1.0, link.second.normal),
    )


def endpoint_offset(link: OrientedRoundHopfLink) -> Vector3:
    """``γ₁ = (p₂ − ℓ) − p₁`` with ℓ the unit arc direction; ``γ₂ = −γ₁``."""
    ell = arc_of_intersection(link).direction
    return link.second.p - ell - link.first.p


def center_arc_endpoints(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Translate each circle by ``γᵢ/2``, then recenter the arc midpoint.

    Afterwards the arc endpoints are the two centers.

    Raises
    ------
    PostconditionFailedError
        If the centers do not coincide with the arc endpoints within 1e-9.
    """
    gamma = endpoint_offset(link)
    moved = OrientedRoundHopfLink(
        _translate(link.first, gamma / 2.0), _translate(link.second, -gamma / 2.0)
    )
    out = RigidMotion.translate(MIDPOINT - (moved.first.p + moved.second.p) / 2.0).apply_link(
        moved
    )
    arc = arc_of_intersection(out)
    dev = max(
        float(np.linalg.norm(np.array(arc.first) - out.first.p)),
        float(np.linalg.norm(np.array(arc.second) - out.second.p)),
    )
    if dev > Y_TOL:
        raise PostconditionFailedError(f"Arc endpoints miss the centers by {dev:.3g}")
    return out


_STAGES = (
    ("center_midpoint", center_midpoint),
    ("orthogonalize", orthogonalize),
    ("equalize_radii", equalize_radii),
    ("normalize_radius", normalize_radius),
    ("center_arc_endpoints", center_arc_endpoints),
)


def retraction_stages(link: OrientedRoundHopfLink) -> list[tuple[str, OrientedRoundHopfLink]]:
    """Output of every stage in order, labelled by stage name."""
    out: list[tuple[str, OrientedRoundHopfLink]] = []
    current = link
    for name, stage in _STAGES:
        current = stage(current)
        logger.debug("Stage %s -> centers %s %s", name, current.first.center, current.second.center)
        out.append((name, current))
    return out


def retract_to_Y(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:  # noqa: N802
    """Compose the five stages."""
    return retraction_stages(link)[-1][1]


# ---------------------------------------------------------------------------
# Y ≅ SO(3)
# ---------------------------------------------------------------------------


def in_Y(link: OrientedRoundHopfLink, tol: float = Y_TOL) -> bool:  # noqa: N802
    """Whether *link* meets the four Y conditions and ``n₂ = n₁ × v``."""
    try:
        frame_of(link, tol)
    except NotInYError:
        return False
    return True


def frame_of(link: OrientedRoundHopfLink, tol: float = Y_TOL) -> Frame:
    """Frame ``[n₁ | v | n₂]`` of a link in Y, with ``v = p₂ − p₁``.

    Raises
    ------
    NotInYError
        If the radii are not 1, ``v`` is not a unit vector orthogonal to
        ``n₁``, the midpoint is off (1/2, 0, 0), or ``n₂ ≠ n₁ × v``.
    """
    errors: list[str] = []
    for label, c in (("first", link.first), ("second", link.second)):
        if abs(c.radius - 1.0) > tol:
            errors.append(f"{label} radius is {c.radius:.12g}")
    n1, n2 = link.first.n, link.second.n
    v = link.second.p - link.first.p
    if abs(float(np.linalg.norm(v)) - 1.0) > tol:
        errors.append(f"center distance is {float(np.linalg.norm(v)):.12g}")
    if abs(float(n1 @ v)) > tol:
        errors.append("v is not orthogonal to n1")
    mid = (link.first.p + link.second.p) / 2.0
    if float(np.max(np.abs(mid - MIDPOINT))) > tol:
        errors.append(f"midpoint is {as_vec3(mid)}")
    expected = np.cross(n1, v)
    if float(np.max(np.abs(expected - n2))) > tol:
        errors.append("n2 differs from n1 x v")
    if errors:
        raise NotInYError("Link is not in Y: " + "; ".join(errors))
    return np.column_stack([n1, v, expected])


def config_of_frame(rotation: npt.ArrayLike) -> OrientedRoundHopfLink:
    """The link in Y whose frame is *rotation*.

    Raises
    ------
    NotRotationError
        If *rotation* is not in SO(3).
    """
    r = require_rotation(rotation)
    n1, v, n2 = r[:, 0], r[:, 1], r[:, 2]
    return OrientedRoundHopfLink(
        RoundCircle.create(MIDPOINT - v / 2.0, 1.0, n1),
        RoundCircle.create(MIDPOINT + v / 2.0, 1.0, n2),
    )


def basepoint_frame() -> Frame:
    return frame_of(basepoint_link())


def _folded(c: RoundCircle) -> RoundCircle:
    # x + 0.0 turns -0.0 into 0.0
    return RoundCircle(as_vec3(c.p + 0.0), c.radius, as_vec3(c.n + 0.0))


def _link_key(link: OrientedRoundHopfLink) -> tuple[float, ...]:
    return tuple(x for c in link.components for x in (*c.center, c.radius, *c.normal))


def deck_representative(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Deck image of *link* with the lexicographically smallest coordinates.

    The deck group only negates normals and swaps labels, both exact in
    floating point, so every image of *link* has the same representative.
    """
    images = [g_act(g, link) for g in DeckElement]
    folded = [OrientedRoundHopfLink(_folded(m.first), _folded(m.second)) for m in images]
    return min(folded, key=_link_key)


def canonical_prism_point(link: OrientedRoundHopfLink) -> PrismPoint:
    """Point of S³/ℚ8 represented by *link*.

    A link with linking number −1 first has its second component reversed.
    The retraction runs on ``deck_representative``, so all four deck images
    give bitwise identical points.  The frame is lifted to SU(2) and
    canonicalized over the lifted deck group; translations agree within
    rounding.
    """
    positive = deck_representative(orient_positively(link))
    frame = frame_of(retract_to_Y(positive))
    q, _ = lift_rotation(frame)
    _, canonical = orbit_and_canonical(q, deck_subgroup())
    return PrismPoint(canonical)


def fiber_coordinates(link: OrientedRoundHopfLink) -> FiberCoordinates:
    """Split *link* into the nine fiber coordinates and its frame in Y."""
    arc = arc_of_intersection(link)
    x0 = center_midpoint(link)
    theta = dihedral_angle(x0)
    x1 = orthogonalize(x0)
    diff = x1.first.radius - x1.second.radius
    x2 = equalize_radii(x1)
    x3 = normalize_radius(x2)
    gamma = endpoint_offset(x3)
    frame = frame_of(center_arc_endpoints(x3))
    return FiberCoordinates(
        translation=as_vec3(np.array(arc.midpoint) - MIDPOINT),
        dihedral=theta,
        radius_difference=diff,
        common_radius=x2.first.radius,
        endpoint_offset=as_vec3(gamma),
        frame=frame,
    )


# ---------------------------------------------------------------------------
# Loops and holonomy
# ---------------------------------------------------------------------------


def _rotation_path(
    start: OrientedRoundHopfLink, axis: Vector3, point: Vector3, n: int
) -> list[OrientedRoundHopfLink]:
    if n < 2:
        raise InputError(f"A loop needs at least 2 samples, got {n}")
    motions = (
        RigidMotion.rotate_about(axis_angle_rotation(axis, math.pi * k / (n - 1)), point)
        for k in range(n)
    )
    return [motion.apply_link(start) for motion in motions]


_S_AXIS = np.array([0.0, 1.0, 1.0]) / math.sqrt(2.0)


def alpha_loop(n: int) -> list[OrientedRoundHopfLink]:
    """Basepoint rotated by πt about the x-axis; ends at α·H."""
    return _rotation_path(basepoint_link(), np.array([1.0, 0.0, 0.0]), np.zeros(3), n)


def s_loop(n: int) -> list[OrientedRoundHopfLink]:
    """Basepoint rotated by πt about (0,1,1)/√2 through (1/2,0,0); ends at s·H."""
    return _rotation_path(basepoint_link(), _S_AXIS, MIDPOINT, n)


def alpha_s_loop(n: int) -> list[OrientedRoundHopfLink]:
    """The α-loop followed by the s-rotation of α·H; ends at αs·H."""
    first = alpha_loop(n)
    second = _rotation_path(g_act(DeckElement.ALPHA, basepoint_link()), _S_AXIS, MIDPOINT, n)
    return first + second[1:]


def loop_holonomy(loop: Sequence[OrientedRoundHopfLink]) -> UnitQuaternion:
    """Lift the frame path of *loop* through SU(2) and return ``q(1)·q(0)⁻¹``.

    Raises
    ------
    NotClosedError
        If the last sample is not a deck translate of the first.
    StepTooLargeError
        If adjacent frames are too far apart to lift.
    """
    if not loop:
        return ONE
    frames = [frame_of(retract_to_Y(link)) for link in loop]
    start, end = frames[0], frames[-1]
    if not any(
        np.allclose(end, start @ m, atol=CLOSURE_TOL) for m in _DECK_MATRICES.values()
    ):
        raise NotClosedError("Loop end is not a deck translate of its start")
    q0, _ = lift_rotation(start)
    lifted = lift_path(frames, q0)
    holonomy = lifted[-1] * q0.conjugate()
    logger.debug("Holonomy over %d samples: %s", len(loop), holonomy.as_tuple())
    return holonomy


def motion_group(holonomies: Sequence[Quaternion], tol: float = CLOSURE_TOL) -> QuaternionSubgroup:
    """Close the holonomies under multiplication at tolerance *tol*."""
    return generate_subgroup(holonomies, tol=tol)
