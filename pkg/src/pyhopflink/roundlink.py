"""Round circles and round Hopf links in ℝ³.

Validation, closed-form linking number, the arc of intersection of the two
spanning discs, dihedral angle, and the ℝ³ × ℝ₊ × ℝP² parameters of a round
unknot.  Rigid motions act on circles and links.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from pyhopflink.errors import (
    DegenerateError,
    EmptyIntersectionError,
    InputError,
    NotLinkedError,
    ParallelPlanesError,
)
from pyhopflink.quat import require_rotation

logger = logging.getLogger(__name__)

Vector3 = npt.NDArray[np.float64]
Vec3 = tuple[float, float, float]

LINK_TOL = 1e-9
NORMAL_TOL = 1e-9


def as_vec3(v: Sequence[float] | npt.ArrayLike) -> Vec3:
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise InputError(f"Expected a 3-vector, got shape {a.shape}")
    return (float(a[0]), float(a[1]), float(a[2]))


def canonical_line(v: npt.ArrayLike, tol: float = LINK_TOL) -> Vec3:
    """Representative of ``±v`` whose first coordinate above *tol* in magnitude is positive."""
    a = np.asarray(v, dtype=float)
    for c in a:
        if abs(c) > tol:
            return as_vec3(a if c > 0 else -a)
    return as_vec3(a)


@dataclass(frozen=True, slots=True)
class RoundCircle:
    """An oriented round circle: center, radius, and unit normal.

    The orientation is counterclockwise when viewed from the tip of the
    normal.
    """

    center: Vec3
    radius: float
    normal: Vec3

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise InputError(f"Circle radius must be positive, got {self.radius}")
        n = math.sqrt(sum(c * c for c in self.normal))
        if abs(n - 1.0) > NORMAL_TOL:
            raise InputError(f"Circle normal must be a unit vector, got norm {n:.12g}")

    @classmethod
    def create(cls, center: npt.ArrayLike, radius: float, normal: npt.ArrayLike) -> RoundCircle:
        """Build a circle, normalizing *normal*."""
        n = np.asarray(normal, dtype=float)
        length = float(np.linalg.norm(n))
        if length == 0.0:
            raise InputError("Circle normal must be nonzero")
        return cls(as_vec3(center), float(radius), as_vec3(n / length))

    @property
    def p(self) -> Vector3:
        return np.array(self.center)

    @property
    def n(self) -> Vector3:
        return np.array(self.normal)

    def reversed(self) -> RoundCircle:
        return RoundCircle(self.center, self.radius, as_vec3(-self.n))

    def basis(self) -> tuple[Vector3, Vector3]:
        """Orthonormal in-plane pair ``(u, w)`` with ``u × w = n``."""
        n = self.n
        axis = np.zeros(3)
        axis[int(np.argmin(np.abs(n)))] = 1.0
        u = np.cross(n, axis)
        u /= np.linalg.norm(u)
        return u, np.cross(n, u)

    def point_at(self, t: float) -> Vector3:
        u, w = self.basis()
        return self.p + self.radius * (math.cos(t) * u + math.sin(t) * w)


@dataclass(frozen=True, slots=True)
class RoundUnknotParams:
    """Orientation-free parameters ``(p, r, ℓ)`` of a round unknot."""

    center: Vec3
    radius: float
    line: Vec3


@dataclass(frozen=True, slots=True)
class OrientedRoundHopfLink:
    """Two oriented round circles; ``first`` and ``second`` fix the labels.

    Build through ``validate_hopf`` unless the configuration is known valid.
    """

    first: RoundCircle
    second: RoundCircle

    @property
    def components(self) -> tuple[RoundCircle, RoundCircle]:
        return (self.first, self.second)

    @property
    def linking_number(self) -> int:
        return linking_number_round(self.first, self.second)


@dataclass(frozen=True, slots=True)
class ArcOfIntersection:
    """Segment in which the two spanning discs meet.

    ``first`` is the endpoint inside disc 1 (it lies on the second circle),
    ``second`` the endpoint inside disc 2 (on the first circle).
    """

    first: Vec3
    second: Vec3
    midpoint: Vec3

    @property
    def direction(self) -> Vector3:
        """Unit vector from ``first`` to ``second``."""
        d = np.array(self.second) - np.array(self.first)
        return d / np.linalg.norm(d)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.array(self.second) - np.array(self.first)))


# ---------------------------------------------------------------------------
# Rigid motions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class RigidMotion:
    """Orientation-preserving isometry ``x ↦ R x + t`` of ℝ³."""

    rotation: Vector3
    translation: Vector3

    def __post_init__(self) -> None:
        object.__setattr__(self, "rotation", require_rotation(self.rotation))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @classmethod
    def identity(cls) -> RigidMotion:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def translate(cls, t: npt.ArrayLike) -> RigidMotion:
        return cls(np.eye(3), np.asarray(t, dtype=float))

    @classmethod
    def rotate_about(cls, rotation: npt.ArrayLike, point: npt.ArrayLike) -> RigidMotion:
        """Rotation by *rotation* fixing *point*."""
        r = np.asarray(rotation, dtype=float)
        c = np.asarray(point, dtype=float)
        return cls(r, c - r @ c)

    def compose(self, other: RigidMotion) -> RigidMotion:
        """``self ∘ other``."""
        return RigidMotion(
            self.rotation @ other.rotation, self.rotation @ other.translation + self.translation
        )

    def inverse(self) -> RigidMotion:
        rt = self.rotation.T
        return RigidMotion(rt, -rt @ self.translation)

    def apply_point(self, x: npt.ArrayLike) -> Vector3:
        return self.rotation @ np.asarray(x, dtype=float) + self.translation

    def apply_circle(self, c: RoundCircle) -> RoundCircle:
        return RoundCircle.create(self.apply_point(c.p), c.radius, self.rotation @ c.n)

    def apply_link(self, link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
        return OrientedRoundHopfLink(self.apply_circle(link.first), self.apply_circle(link.second))


# ---------------------------------------------------------------------------
# Linking number
# ---------------------------------------------------------------------------


def linking_number_round(a: RoundCircle, b: RoundCircle, tol: float = LINK_TOL) -> int:
    """Signed count of crossings of *b* through the flat disc of *a*.

    Each crossing contributes ``sign(tangent(b) · n_a)``.  The count is
    symmetric in *a* and *b* and changes sign when either orientation flips.

    Raises
    ------
    DegenerateError
        If *b* is tangent to the plane of *a*, crosses it on the circle *a*,
        or the circles are coplanar and meet.
    """
    na = a.n
    u, w = b.basis()
    coef_a = b.radius * float(u @ na)
    coef_b = b.radius * float(w @ na)
    coef_c = float((b.p - a.p) @ na)
    amp = math.hypot(coef_a, coef_b)

    if amp <= tol:
        if abs(coef_c) > tol:
            return 0
        d = float(np.linalg.norm(b.p - a.p))
        if d > a.radius + b.radius + tol or d < abs(a.radius - b.radius) - tol:
            return 0
        raise DegenerateError(f"Coplanar circles meet (center distance {d:.6g})")

    if abs(amp - abs(coef_c)) <= tol:
        raise DegenerateError("Second circle is tangent to the plane of the first")
    if abs(coef_c) > amp:
        return 0

    phi = math.atan2(coef_b, coef_a)
    spread = math.acos(-coef_c / amp)
    total = 0
    for t in (phi + spread, phi - spread):
        x = b.p + b.radius * (math.cos(t) * u + math.sin(t) * w)
        rho = float(np.linalg.norm(x - a.p))
        if abs(rho - a.radius) <= tol:
            raise DegenerateError(
                f"Crossing at distance {rho:.12g} lies on the boundary circle of radius {a.radius}"
            )
        if rho < a.radius:
            slope = -coef_a * math.sin(t) + coef_b * math.cos(t)
            total += 1 if slope > 0 else -1
    return total


def validate_hopf(a: RoundCircle, b: RoundCircle) -> OrientedRoundHopfLink:
    """Accept ``(a, b)`` as a round Hopf link.

    Raises
    ------
    NotLinkedError
        If the linking number is 0.
    DegenerateError
        If the circles touch or a crossing is not transverse.
    """
    lk = linking_number_round(a, b)
    if lk == 0:
        raise NotLinkedError("Circles are not linked (linking number 0)")
    if abs(lk) != 1:
        raise DegenerateError(f"Round circles with linking number {lk}")
    return OrientedRoundHopfLink(a, b)


def reverse_component(link: OrientedRoundHopfLink, index: int) -> OrientedRoundHopfLink:
    """Reverse the orientation of component *index* (0 or 1)."""
    if index == 0:
        return OrientedRoundHopfLink(link.first.reversed(), link.second)
    if index == 1:
        return OrientedRoundHopfLink(link.first, link.second.reversed())
    raise InputError(f"Component index must be 0 or 1, got {index}")


def orient_positively(link: OrientedRoundHopfLink) -> OrientedRoundHopfLink:
    """Reverse the second component if needed so the linking number is +1."""
    if link.linking_number < 0:
        logger.debug("Reversing second component to reach linking number +1")
        return reverse_component(link, 1)
    return link


# ---------------------------------------------------------------------------
# Arc of intersection and dihedral angle
# ---------------------------------------------------------------------------


def _plane_line(a: RoundCircle, b: RoundCircle) -> tuple[Vector3, Vector3]:
    """A point on the common line of the two planes and its unit direction."""
    n1, n2 = a.n, b.n
    cross = np.cross(n1, n2)
    s2 = float(cross @ cross)
    if math.sqrt(s2) <= LINK_TOL:
        raise ParallelPlanesError("Planes of the two circles are parallel")
    d1 = float(n1 @ a.p)
    d2 = float(n2 @ b.p)
    x0 = (d1 * np.cross(n2, cross) + d2 * np.cross(cross, n1)) / s2
    return x0, cross / math.sqrt(s2)


def _chord(c: RoundCircle, x0: Vector3, direction: Vector3) -> tuple[float, float]:
    """Parameter interval of the line ``x0 + t·direction`` inside the disc of *c*."""
    tc = float((c.p - x0) @ direction)
    off = c.p - x0 - tc * direction
    h2 = c.radius**2 - float(off @ off)
    if h2 <= 0.0:
        raise EmptyIntersectionError("Plane-intersection line misses a disc")
    h = math.sqrt(h2)
    return tc - h, tc + h


def arc_of_intersection(
    link: OrientedRoundHopfLink, tol: float = LINK_TOL
) -> ArcOfIntersection:
    """Segment where the two flat discs of *link* meet.

    Raises
    ------
    ParallelPlanesError
        If the disc planes are parallel.
    EmptyIntersectionError
        If the chords are disjoint or nested, so the discs do not meet in an
        arc running from one circle to the other.
    DegenerateError
        If the chords share an endpoint.
    """
    x0, direction = _plane_line(link.first, link.second)
    lo1, hi1 = _chord(link.first, x0, direction)
    lo2, hi2 = _chord(link.second, x0, direction)
    if abs(lo1 - lo2) <= tol or abs(hi1 - hi2) <= tol:
        raise DegenerateError("Chords of the two discs share an endpoint")
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if hi - lo <= tol:
        if hi - lo < -tol:
            raise EmptyIntersectionError("Discs do not meet")
        raise DegenerateError("Discs meet in a single point")
    if (lo1 < lo2) == (hi1 > hi2):
        raise EmptyIntersectionError("One chord is nested in the other; not a Hopf configuration")

    # lo2 > lo1 means the low end belongs to chord 2, i.e. lies on the second circle
    on_second, on_first = (lo, hi) if lo2 > lo1 else (hi, lo)
    e1 = x0 + on_second * direction
    e2 = x0 + on_first * direction
    return ArcOfIntersection(as_vec3(e1), as_vec3(e2), as_vec3((e1 + e2) / 2.0))


def dihedral_angle(link: OrientedRoundHopfLink) -> float:
    """Angle ``θ ∈ (0, π)`` between the oriented normals, ``cos θ = n₁·n₂``.

    Raises
    ------
    ParallelPlanesError
        If the planes are parallel.
    """
    n1, n2 = link.first.n, link.second.n
    if float(np.linalg.norm(np.cross(n1, n2))) <= LINK_TOL:
        raise ParallelPlanesError("Planes of the two circles are parallel")
    return math.acos(max(-1.0, min(1.0, float(n1 @ n2))))


# ---------------------------------------------------------------------------
# Parameters of a round unknot
# ---------------------------------------------------------------------------


def round_unknot_params(c: RoundCircle) -> RoundUnknotParams:
    """Forget the orientation: ``(p, r, ℓ)`` with ℓ the canonical normal line."""
    return RoundUnknotParams(c.center, c.radius, canonical_line(c.n))


def oriented_unknot_params(c: RoundCircle) -> tuple[Vec3, float, Vec3]:
    """Coordinates ``(p, r, n)`` of the oriented unknot in ℝ³ × ℝ₊ × S²."""
    return c.center, c.radius, c.normal


def circle_from_params(params: RoundUnknotParams) -> RoundCircle:
    """A circle with the given parameters, oriented by the canonical line."""
    return RoundCircle.create(params.center, params.radius, params.line)


def sample_circle(c: RoundCircle, n: int, offset: float = 0.0) -> Vector3:
    """``n × 3`` array of equally spaced points following the orientation."""
    if n < 3:
        raise InputError(f"Need at least 3 samples, got {n}")
    u, w = c.basis()
    t = offset + 2.0 * np.pi * np.arange(n) / n
    return c.p + c.radius * (np.outer(np.cos(t), u) + np.outer(np.sin(t), w))


def basepoint_link() -> OrientedRoundHopfLink:
    """Unit circle in the xy-plane and unit circle about (1,0,0) in the xz-plane.

    Normals are ``e₃`` and ``e₂ = e₃ × e₁``, so the linking number is +1.
    """
    return OrientedRoundHopfLink(
        RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
        RoundCircle((1.0, 0.0, 0.0), 1.0, (0.0, 1.0, 0.0)),
    )
