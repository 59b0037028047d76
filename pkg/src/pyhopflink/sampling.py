"""Seeded random links, frames, rigid motions and planes.

Every sampler takes a ``numpy.random.Generator``; independent streams come
from ``spawn_generators``, which splits a ``SeedSequence`` so results do not
depend on the order in which streams are consumed.
"""

from __future__ import annotations

import math

import numpy as np

from pyhopflink.errors import DegenerateError, NotLinkedError
from pyhopflink.grassmann import Plane2in4
from pyhopflink.quat import (
    Quaternion,
    Rotation3,
    UnitQuaternion,
    axis_angle_rotation,
    conjugation_action,
)
from pyhopflink.roundlink import (
    OrientedRoundHopfLink,
    RigidMotion,
    RoundCircle,
    Vector3,
    orient_positively,
    validate_hopf,
)

MIN_ANGLE = 0.2
RADIUS_RANGE = (0.5, 2.0)
BOX = 5.0


def spawn_generators(seed: int, count: int) -> list[np.random.Generator]:
    """*count* independent PCG64 generators derived from *seed*."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> Vector3:
    while True:
        v = rng.standard_normal(dim)
        n = float(np.linalg.norm(v))
        if n > 1e-6:
            return v / n


def random_unit_quaternion(rng: np.random.Generator) -> UnitQuaternion:
    """Haar-uniform point of S³."""
    return Quaternion.from_array(random_unit_vector(rng, 4))


def random_rotation(rng: np.random.Generator) -> Rotation3:
    return conjugation_action(random_unit_quaternion(rng))


def random_rigid_motion(rng: np.random.Generator) -> RigidMotion:
    return RigidMotion(random_rotation(rng), rng.uniform(-BOX, BOX, 3))


def random_link(rng: np.random.Generator) -> OrientedRoundHopfLink:
    """Random round Hopf link with linking number +1.

    The arc of intersection is drawn first (midpoint, direction, length);
    each disc is then placed so that its chord on the common line runs past
    the far end of the arc and stops at the near end.  The dihedral angle
    stays at least 0.2 away from 0 and π.
    """
    while True:
        m = rng.uniform(-BOX, BOX, 3)
        ell = random_unit_vector(rng)
        r1, r2 = rng.uniform(*RADIUS_RANGE, 2)
        arc = rng.uniform(0.2, 0.95) * min(r1, r2) / 0.6
        h1 = 0.55 * arc + rng.uniform(0.05, 0.95) * (r1 - 0.55 * arc)
        h2 = 0.55 * arc + rng.uniform(0.05, 0.95) * (r2 - 0.55 * arc)

        n1 = np.cross(ell, random_unit_vector(rng))
        if np.linalg.norm(n1) < 1e-3:
            continue
        n1 /= np.linalg.norm(n1)
        theta = rng.uniform(MIN_ANGLE, math.pi - MIN_ANGLE)
        n2 = axis_angle_rotation(ell, theta) @ n1

        centers = []
        for n, r, h, t in ((n1, r1, h1, arc / 2 - h1), (n2, r2, h2, -arc / 2 + h2)):
            side = 1.0 if rng.random() < 0.5 else -1.0
            centers.append(m + t * ell + side * math.sqrt(r * r - h * h) * np.cross(n, ell))
        try:
            link = validate_hopf(
                RoundCircle.create(centers[0], r1, n1), RoundCircle.create(centers[1], r2, n2)
            )
        except (DegenerateError, NotLinkedError):
            continue
        return orient_positively(link)


def random_plane(rng: np.random.Generator) -> Plane2in4:
    """Random oriented 2-plane in ℝ⁴ from the QR factor of a Gaussian matrix."""
    q, _ = np.linalg.qr(rng.standard_normal((4, 2)))
    return Plane2in4(Quaternion.from_array(q[:, 0]), Quaternion.from_array(q[:, 1]))
