"""Great Hopf links in S³ and oriented 2-planes in ℝ⁴.

An oriented plane spanned by orthonormal quaternions ``(x, y)`` meets S³ in
a great circle; its orthogonal complement gives the circle linking it once.
``ξ = (μ, ν)`` identifies oriented planes with S² × S², and canonicalizing
each factor up to sign gives coordinates on ℝP² × ℝP² that are constant on
the deck orbit {V, V⊥, orientation flips}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from pyhopflink.errors import InputError, NotOrthonormalError, PoleProximityError
from pyhopflink.quat import ONE, I, Quaternion
from pyhopflink.retraction import DeckElement
from pyhopflink.roundlink import Vec3, canonical_line

logger = logging.getLogger(__name__)

ORTHO_TOL = 1e-10
POLE_TOL = 1e-6

S2Point = Quaternion
"""A purely imaginary unit quaternion."""

# Away from both basepoint great circles {z = w = 0} and {x = y = 0}.
DEFAULT_POLE = np.array([1.0, 2.0, 3.0, 4.0]) / math.sqrt(30.0)


@dataclass(frozen=True, slots=True)
class Plane2in4:
    """Oriented 2-plane in ℝ⁴ given by an orthonormal pair of quaternions.

    Raises
    ------
    NotOrthonormalError
        If ``|x|``, ``|y|`` differ from 1 or ``⟨x, y⟩`` from 0 by more than 1e-10.
    """

    x: Quaternion
    y: Quaternion

    def __post_init__(self) -> None:
        nx_, ny_, ip = self.x.norm(), self.y.norm(), self.x.dot(self.y)
        if abs(nx_ - 1.0) > ORTHO_TOL or abs(ny_ - 1.0) > ORTHO_TOL or abs(ip) > ORTHO_TOL:
            raise NotOrthonormalError(
                f"Basis is not orthonormal (|x|={nx_:.12g}, |y|={ny_:.12g}, <x,y>={ip:.3g})"
            )

    @classmethod
    def from_arrays(cls, x: npt.ArrayLike, y: npt.ArrayLike) -> Plane2in4:
        return cls(
            Quaternion.from_array(np.asarray(x, dtype=float)),
            Quaternion.from_array(np.asarray(y, dtype=float)),
        )

    def basis_matrix(self) -> npt.NDArray[np.float64]:
        """``2 x 4`` matrix with rows ``x`` and ``y``."""
        return np.stack([self.x.as_array(), self.y.as_array()])


@dataclass(frozen=True, slots=True)
class RP2Pair:
    """Two sign-canonicalized points of S², read as a point of ℝP² × ℝP²."""

    first: Vec3
    second: Vec3


def inner(x: Quaternion, y: Quaternion) -> float:
    """``⟨x, y⟩ = ½(x ȳ + y x̄)``, the real part of ``x ȳ``."""
    return (x * y.conjugate() + y * x.conjugate()).scale(0.5).w


def _require_orthonormal(x: Quaternion, y: Quaternion) -> None:
    Plane2in4(x, y)


def mu(x: Quaternion, y: Quaternion) -> S2Point:
    """``μ(x, y) = ½(x ȳ − y x̄)``.

    Raises
    ------
    NotOrthonormalError
        If ``(x, y)`` is not orthonormal.
    """
    _require_orthonormal(x, y)
    return (x * y.conjugate() - y * x.conjugate()).scale(0.5)


def nu(x: Quaternion, y: Quaternion) -> S2Point:
    """``ν(x, y) = ½(x̄ y − ȳ x)``.

    Raises
    ------
    NotOrthonormalError
        If ``(x, y)`` is not orthonormal.
    """
    _require_orthonormal(x, y)
    return (x.conjugate() * y - y.conjugate() * x).scale(0.5)


def xi(plane: Plane2in4) -> tuple[S2Point, S2Point]:
    """``ξ(V) = (μ, ν)``; independent of the oriented basis of *V*."""
    return mu(plane.x, plane.y), nu(plane.x, plane.y)


def rotate_basis(plane: Plane2in4, angle: float) -> Plane2in4:
    """Same oriented plane with the basis turned by *angle* inside it."""
    c, s = math.cos(angle), math.sin(angle)
    x, y = plane.x, plane.y
    return Plane2in4(x.scale(c) + y.scale(s), y.scale(c) - x.scale(s))


def orthogonal_complement(plane: Plane2in4) -> Plane2in4:
    """``V⊥`` with its basis chosen so that ``(x, y, z, w)`` is positively oriented."""
    _, _, vt = np.linalg.svd(plane.basis_matrix())
    z, w = vt[2], vt[3]
    if np.linalg.det(np.stack([plane.x.as_array(), plane.y.as_array(), z, w])) < 0:
        w = -w
    return Plane2in4(Quaternion.from_array(z), Quaternion.from_array(w))


def canonical_s2(q: S2Point) -> Vec3:
    """Imaginary part of ``±q`` with first coordinate above 1e-9 in magnitude positive."""
    return canonical_line(q.imag)


def canonical_great_hopf(plane: Plane2in4) -> RP2Pair:
    """Point of ℝP² × ℝP² for the great Hopf link ``{V, V⊥}``."""
    m, n = xi(plane)
    return RP2Pair(canonical_s2(m), canonical_s2(n))


def plucker(plane: Plane2in4) -> npt.NDArray[np.float64]:
    """Unit bivector ``x ∧ y`` in the basis ``e₀₁, e₀₂, e₀₃, e₁₂, e₁₃, e₂₃``."""
    x, y = plane.x.as_array(), plane.y.as_array()
    return np.array(
        [x[a] * y[b] - x[b] * y[a] for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))]
    )


def plane_distance(a: Plane2in4, b: Plane2in4) -> float:
    """Distance between oriented planes as unit bivectors."""
    return float(np.linalg.norm(plucker(a) - plucker(b)))


def basepoint_plane() -> Plane2in4:
    """``span⁺(1, i)``: the great circle ``x² + y² = 1`` in the first two coordinates."""
    return Plane2in4(ONE, I)


# ---------------------------------------------------------------------------
# Deck group
# ---------------------------------------------------------------------------


def deck_act_plane(g: DeckElement, plane: Plane2in4) -> Plane2in4:
    """α reverses the orientation; s passes to the complement."""
    out = plane
    if g in (DeckElement.ALPHA, DeckElement.ALPHA_S):
        out = Plane2in4(out.x, -out.y)
    if g in (DeckElement.S, DeckElement.ALPHA_S):
        out = orthogonal_complement(out)
    return out


def xi_deck_signs(plane: Plane2in4) -> dict[DeckElement, tuple[int, int]]:
    """Signs ``(ε₁, ε₂)`` with ``ξ(g·V) = (ε₁ μ(V), ε₂ ν(V))`` for each deck element."""
    m, n = xi(plane)
    signs: dict[DeckElement, tuple[int, int]] = {}
    for g in DeckElement:
        gm, gn = xi(deck_act_plane(g, plane))
        signs[g] = (1 if gm.dot(m) > 0 else -1, 1 if gn.dot(n) > 0 else -1)
    return signs


# ---------------------------------------------------------------------------
# Great circles and stereographic projection
# ---------------------------------------------------------------------------


def great_circle_points(plane: Plane2in4, n: int, offset: float = 0.0) -> npt.NDArray[np.float64]:
    """``n x 4`` points ``cos(t) x + sin(t) y`` at ``t = offset + 2πk/n``.

    Any n ≥ 3 is accepted, not only the n ≥ 8 used for linking checks, so
    coarse samplings such as the four points ``±x, ±y`` are available.

    Raises
    ------
    InputError
        If *n* is below 3.
    """
    if n < 3:
        raise InputError(f"Need at least 3 points on a great circle, got {n}")
    t = offset + 2.0 * np.pi * np.arange(n) / n
    return np.outer(np.cos(t), plane.x.as_array()) + np.outer(np.sin(t), plane.y.as_array())


def great_hopf_link(
    plane: Plane2in4, n: int, offset: float = 0.0
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Sampled great circles of *plane* and of its complement."""
    return (
        great_circle_points(plane, n, offset),
        great_circle_points(orthogonal_complement(plane), n, offset),
    )


def _pole_basis(pole: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """``4 x 3`` orthonormal basis of the hyperplane orthogonal to *pole*."""
    q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)]))
    basis = q[:, 1:4]
    if np.linalg.det(np.column_stack([basis, pole])) < 0:
        basis[:, 2] = -basis[:, 2]
    return basis


def _unit_pole(pole: npt.ArrayLike | None) -> npt.NDArray[np.float64]:
    n = DEFAULT_POLE if pole is None else np.asarray(pole, dtype=float)
    length = float(np.linalg.norm(n))
    if length == 0.0:
        raise InputError("Projection pole must be nonzero")
    return n / length


def stereographic(
    p: npt.ArrayLike, pole: npt.ArrayLike | None = None
) -> npt.NDArray[np.float64]:
    """Project points of S³ (shape ``(4,)`` or ``(k, 4)``) from *pole* to ℝ³.

    Raises
    ------
    InputError
        If a point is off the unit sphere by more than 1e-9.
    PoleProximityError
        If a point is within 1e-6 of the pole.
    """
    n = _unit_pole(pole)
    pts = np.asarray(p, dtype=float)
    norms = np.linalg.norm(pts, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise InputError("Points must lie on the unit 3-sphere")
    dist = np.linalg.norm(pts - n, axis=-1)
    if np.any(dist < POLE_TOL):
        raise PoleProximityError(f"Point within {float(np.min(dist)):.3g} of the projection pole")
    gap = 1.0 - pts @ n
    return np.asarray((pts @ _pole_basis(n)) / gap[..., None])


def inverse_stereographic(
    u: npt.ArrayLike, pole: npt.ArrayLike | None = None
) -> npt.NDArray[np.float64]:
    """Inverse of ``stereographic`` for the same pole."""
    n = _unit_pole(pole)
    pts = np.asarray(u, dtype=float)
    r2 = np.sum(pts**2, axis=-1)[..., None]
    return np.asarray((2.0 * pts @ _pole_basis(n).T + (r2 - 1.0) * n) / (r2 + 1.0))


def project_great_hopf_link(
    plane: Plane2in4, n: int = 64, pole: npt.ArrayLike | None = None
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Both circles of the great Hopf link of *plane*, projected into ℝ³."""
    first, second = great_hopf_link(plane, n)
    logger.debug("Projecting great Hopf link with %d samples per circle", n)
    return stereographic(first, pole), stereographic(second, pole)
