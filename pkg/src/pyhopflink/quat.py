"""Quaternion algebra, the SU(2) → SO(3) double cover, path lifting, and
orbit canonicalization under finite quaternion subgroups.

Pure functions on immutable values.  Quaternions use Hamilton conventions
(i² = j² = k² = −1, ij = k) and are stored as ``(w, x, y, z)``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from pyhopflink.errors import (
    InputError,
    NonUnitError,
    NotRotationError,
    StepTooLargeError,
)

logger = logging.getLogger(__name__)

Rotation3 = npt.NDArray[np.float64]
"""A 3×3 real matrix with orthonormal columns and determinant +1."""

UNIT_TOL = 1e-9
ROTATION_TOL = 1e-9
DEDUP_TOL = 1e-9
MAX_LIFT_STEP = math.pi / 4


@dataclass(frozen=True, slots=True)
class Quaternion:
    """A real quaternion ``w + x i + y j + z k``."""

    w: float
    x: float
    y: float
    z: float

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_array(cls, arr: Sequence[float] | npt.NDArray[np.float64]) -> Quaternion:
        """Build from a length-4 sequence ``(w, x, y, z)``."""
        if len(arr) != 4:
            raise InputError(f"Quaternion needs 4 components, got {len(arr)}")
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))

    @classmethod
    def pure(cls, v: Sequence[float] | npt.NDArray[np.float64]) -> Quaternion:
        """Purely imaginary quaternion with imaginary part *v*."""
        return cls(0.0, float(v[0]), float(v[1]), float(v[2]))

    # -- algebra --------------------------------------------------------------

    def __mul__(self, other: Quaternion) -> Quaternion:
        a, b = self, other
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, s: float) -> Quaternion:
        return Quaternion(s * self.w, s * self.x, s * self.y, s * self.z)

    def conjugate(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> Quaternion:
        n2 = self.dot(self)
        if n2 == 0.0:
            raise NonUnitError("Cannot invert the zero quaternion")
        return self.conjugate().scale(1.0 / n2)

    def dot(self, other: Quaternion) -> float:
        """Euclidean inner product on ℝ⁴."""
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> Quaternion:
        n = self.norm()
        if n == 0.0:
            raise NonUnitError("Cannot normalize the zero quaternion")
        return self.scale(1.0 / n)

    # -- views ----------------------------------------------------------------

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> npt.NDArray[np.float64]:
        return np.array([self.x, self.y, self.z])

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.w, self.x, self.y, self.z])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def is_close(self, other: Quaternion, tol: float = DEDUP_TOL) -> bool:
        """Componentwise equality within *tol*."""
        return (
            abs(self.w - other.w) <= tol
            and abs(self.x - other.x) <= tol
            and abs(self.y - other.y) <= tol
            and abs(self.z - other.z) <= tol
        )


UnitQuaternion = Quaternion
"""A ``Quaternion`` of norm 1; validated at each entry point that needs it."""

ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)  # noqa: E741
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def require_unit(q: Quaternion, tol: float = UNIT_TOL) -> None:
    """Raise ``NonUnitError`` unless ``|q| = 1`` within *tol*."""
    n = q.norm()
    if abs(n - 1.0) > tol:
        raise NonUnitError(f"Quaternion {q.as_tuple()} has norm {n:.12g}, expected 1")


def require_rotation(r: npt.ArrayLike, tol: float = ROTATION_TOL) -> Rotation3:
    """Return *r* as a float array, raising ``NotRotationError`` unless it is in SO(3)."""
    m = np.asarray(r, dtype=float)
    if m.shape != (3, 3):
        raise NotRotationError(f"Expected a 3x3 matrix, got shape {m.shape}")
    ortho = float(np.max(np.abs(m.T @ m - np.eye(3))))
    if ortho > tol:
        raise NotRotationError(f"Columns not orthonormal (max deviation {ortho:.3g})")
    det = float(np.linalg.det(m))
    if abs(det - 1.0) > tol:
        raise NotRotationError(f"Determinant is {det:.12g}, expected +1")
    return m


# ---------------------------------------------------------------------------
# The double cover
# ---------------------------------------------------------------------------


def conjugation_action(q: UnitQuaternion) -> Rotation3:
    """Rotation matrix of ``v ↦ Im(q v q⁻¹)`` on the imaginary quaternions.

    ``conjugation_action(q) == conjugation_action(-q)``; the kernel of the
    cover is ``{±1}``.

    Raises
    ------
    NonUnitError
        If ``|q|`` deviates from 1 by more than 1e-9.
    """
    require_unit(q)
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def lift_rotation(r: npt.ArrayLike) -> tuple[UnitQuaternion, UnitQuaternion]:
    """The two unit quaternions ``(q, -q)`` covering the rotation *r*.

    The first element has nonnegative real part (ties broken by the first
    nonzero imaginary component being positive).

    Raises
    ------
    NotRotationError
        If *r* is not in SO(3) within 1e-9.
    """
    m = require_rotation(r)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = Quaternion(
            0.25 * s,
            (m[2, 1] - m[1, 2]) / s,
            (m[0, 2] - m[2, 0]) / s,
            (m[1, 0] - m[0, 1]) / s,
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = Quaternion(
            (m[2, 1] - m[1, 2]) / s,
            0.25 * s,
            (m[0, 1] + m[1, 0]) / s,
            (m[0, 2] + m[2, 0]) / s,
        )
    elif m[1, 1] > m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = Quaternion(
            (m[0, 2] - m[2, 0]) / s,
            (m[0, 1] + m[1, 0]) / s,
            0.25 * s,
            (m[1, 2] + m[2, 1]) / s,
        )
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = Quaternion(
            (m[1, 0] - m[0, 1]) / s,
            (m[0, 2] + m[2, 0]) / s,
            (m[1, 2] + m[2, 1]) / s,
            0.25 * s,
        )
    q = q.normalized()
    if _sign_key(q) < 0:
        q = -q
    return q, -q


def _sign_key(q: Quaternion) -> int:
    """Sign of the first component of *q* that is not ~0."""
    for c in q.as_tuple():
        if c > DEDUP_TOL:
            return 1
        if c < -DEDUP_TOL:
            return -1
    return 0


def rotation_angle(r: npt.ArrayLike) -> float:
    """Rotation angle in ``[0, π]`` of a matrix in SO(3)."""
    m = np.asarray(r, dtype=float)
    c = (float(np.trace(m)) - 1.0) / 2.0
    return math.acos(max(-1.0, min(1.0, c)))


def axis_angle_quaternion(axis: npt.ArrayLike, angle: float) -> UnitQuaternion:
    """Unit quaternion ``cos(angle/2) + sin(angle/2) · axis``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    s = math.sin(angle / 2.0)
    return Quaternion(math.cos(angle / 2.0), s * a[0], s * a[1], s * a[2])


def axis_angle_rotation(axis: npt.ArrayLike, angle: float) -> Rotation3:
    """Right-handed rotation by *angle* about *axis* (Rodrigues)."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    kx = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def lift_path(
    rotations: Sequence[npt.ArrayLike],
    q0: UnitQuaternion,
    max_step: float = MAX_LIFT_STEP,
) -> list[UnitQuaternion]:
    """Continuous lift of a sampled rotation path through SU(2) → SO(3).

    Each lifted sample covers its rotation, and consecutive samples have a
    positive 4-dot-product.  The lift starts at *q0*.

    Raises
    ------
    NonUnitError
        If *q0* is not a unit quaternion.
    NotRotationError
        If a sample is not in SO(3), or *q0* does not cover the first sample.
    StepTooLargeError
        If adjacent samples differ by a rotation angle of *max_step* or more.
    """
    require_unit(q0)
    if not rotations:
        return []
    first = require_rotation(rotations[0])
    dev = float(np.max(np.abs(conjugation_action(q0) - first)))
    if dev > 1e-8:
        raise NotRotationError(f"q0 does not cover the first sample (deviation {dev:.3g})")

    lifted: list[Quaternion] = [q0]
    prev_r = first
    for idx in range(1, len(rotations)):
        r = require_rotation(rotations[idx])
        step = rotation_angle(prev_r.T @ r)
        if step >= max_step:
            raise StepTooLargeError(
                f"Step {idx} rotates by {step:.3f} rad, above the {max_step:.3f} rad lifting bound"
            )
        q, _ = lift_rotation(r)
        if q.dot(lifted[-1]) < 0:
            q = -q
        lifted.append(q)
        prev_r = r
    logger.debug("Lifted path of %d samples, endpoint %s", len(lifted), lifted[-1].as_tuple())
    return lifted


# ---------------------------------------------------------------------------
# Finite subgroups and orbit canonicalization
# ---------------------------------------------------------------------------


def dedup(quats: Iterable[Quaternion], tol: float = DEDUP_TOL) -> list[Quaternion]:
    """Drop quaternions within *tol* of an earlier one, keeping first-seen order."""
    kept: list[Quaternion] = []
    for q in quats:
        if not any(q.is_close(k, tol) for k in kept):
            kept.append(q)
    return kept


def _lex_greater(a: Quaternion, b: Quaternion, tol: float) -> bool:
    """``a > b`` in the (w, x, y, z) lexicographic order, components within *tol* tie."""
    for ca, cb in zip(a.as_tuple(), b.as_tuple()):
        if ca > cb + tol:
            return True
        if ca < cb - tol:
            return False
    return False


def lex_max(quats: Sequence[Quaternion], tol: float = DEDUP_TOL) -> Quaternion:
    """Lexicographic maximum by ``(w, x, y, z)`` with tolerance ties."""
    best = quats[0]
    for q in quats[1:]:
        if _lex_greater(q, best, tol):
            best = q
    return best


@dataclass(frozen=True, slots=True)
class QuaternionSubgroup:
    """A finite subgroup of the unit quaternions, containing ±1.

    Raises
    ------
    InputError
        If the elements are not closed under products and inverses, or
        do not contain ``1`` and ``-1``.
    """

    elements: tuple[Quaternion, ...]
    tol: float = field(default=DEDUP_TOL, compare=False)

    def __post_init__(self) -> None:
        for q in self.elements:
            require_unit(q, max(UNIT_TOL, self.tol))
        if not self.contains(ONE) or not self.contains(-ONE):
            raise InputError("Subgroup must contain 1 and -1")
        for a in self.elements:
            if not self.contains(a.conjugate()):
                raise InputError(f"Subgroup not closed under inverse at {a.as_tuple()}")
            for b in self.elements:
                if not self.contains(a * b):
                    raise InputError(
                        f"Subgroup not closed under product of {a.as_tuple()} and {b.as_tuple()}"
                    )

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Quaternion]:
        return iter(self.elements)

    def contains(self, q: Quaternion, tol: float | None = None) -> bool:
        limit = self.tol if tol is None else tol
        return any(q.is_close(g, limit) for g in self.elements)


def generate_subgroup(
    generators: Iterable[Quaternion],
    tol: float = DEDUP_TOL,
    max_order: int = 1024,
) -> QuaternionSubgroup:
    """Close *generators* (and ``-1``) under multiplication.

    Raises
    ------
    InputError
        If the closure exceeds *max_order* elements (not a finite group at
        this tolerance).
    """
    gens = [g.normalized() for g in generators] + [-ONE]
    elements: list[Quaternion] = [ONE]
    frontier: list[Quaternion] = [ONE]
    while frontier:
        nxt: list[Quaternion] = []
        for a in frontier:
            for g in gens:
                p = a * g
                if not any(p.is_close(e, tol) for e in elements):
                    elements.append(p)
                    nxt.append(p)
                    if len(elements) > max_order:
                        raise InputError(f"Closure exceeds {max_order} elements")
        frontier = nxt
    return QuaternionSubgroup(tuple(elements), tol)


def standard_q8() -> QuaternionSubgroup:
    """The quaternion group ``{±1, ±i, ±j, ±k}``."""
    return QuaternionSubgroup((ONE, -ONE, I, -I, J, -J, K, -K))


def orbit_and_canonical(
    q: UnitQuaternion,
    group: QuaternionSubgroup | Sequence[Quaternion],
    tol: float = DEDUP_TOL,
) -> tuple[list[UnitQuaternion], UnitQuaternion]:
    """Right orbit ``{q·g : g ∈ G}`` and its lexicographic maximum.

    The orbit is deduplicated at *tol*.  The canonical representative is the
    ``(w, x, y, z)`` lexicographic maximum, so ``canonical(q·g)`` agrees with
    ``canonical(q)`` for every ``g`` in the group.
    """
    orbit = dedup((q * g for g in group), tol)
    return orbit, lex_max(orbit, tol)


def image_in_so3(group: QuaternionSubgroup | Sequence[Quaternion]) -> list[Rotation3]:
    """Distinct rotations ``conjugation_action(g)`` for ``g`` in *group*."""
    images: list[Rotation3] = []
    for g in group:
        m = conjugation_action(g)
        if not any(np.allclose(m, e, atol=1e-8) for e in images):
            images.append(m)
    return images


def is_central_extension(group: QuaternionSubgroup) -> bool:
    """Check ``1 → ℤ/2 → G → ℤ/2×ℤ/2 → 1`` with cyclic ℤ/4 preimages.

    True when the image in SO(3) is a Klein four group of π-rotations, the
    kernel is ``{±1}``, and every non-central element squares to ``-1``.
    """
    images = image_in_so3(group)
    if len(images) != 4 or len(group) != 8:
        return False
    for m in images:
        if np.allclose(m, np.eye(3), atol=1e-8):
            continue
        if abs(rotation_angle(m) - math.pi) > 1e-8:
            return False
    kernel = [g for g in group if np.allclose(conjugation_action(g), np.eye(3), atol=1e-8)]
    if len(kernel) != 2:
        return False
    central = (ONE, -ONE)
    return all(
        (g * g).is_close(-ONE, 1e-8)
        for g in group
        if not any(g.is_close(c) for c in central)
    )
