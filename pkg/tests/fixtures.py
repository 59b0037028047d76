"""Shared geometric fixtures: the basepoint link, its disc scene, and deformed discs."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from pyhopflink.codec import Scene, circle_to_json, link_to_json
from pyhopflink.plgeom import TriMesh, bump_mesh, disc_mesh
from pyhopflink.roundlink import OrientedRoundHopfLink, RoundCircle, basepoint_link

BASEPOINT = basepoint_link()

# Boundary point of the second disc at angle 150°, inside the unit sphere.
FINGER_CENTER = (1.0 + math.cos(math.radians(150.0)), 0.0, math.sin(math.radians(150.0)))
BUBBLE_CENTER = (0.5, 0.0, 0.2)
Y_AXIS = (0.0, 1.0, 0.0)


def basepoint_scene(resolution: int = 64) -> Scene:
    """Disc of the second basepoint circle against ellipsoids around the first."""
    return Scene(disc_mesh(BASEPOINT.second, resolution), BASEPOINT.first, (0.5, 2.0))


def finger_mesh(resolution: int = 64) -> TriMesh:
    """Second disc with a finger pushed out through the upper hemisphere of E_1."""
    base = disc_mesh(BASEPOINT.second, resolution)
    return bump_mesh(base, FINGER_CENTER, 1.2, 0.2, Y_AXIS)


def bubble_mesh(resolution: int = 64) -> TriMesh:
    """Second disc with an interior bubble poking out of E_1 away from both circles."""
    base = disc_mesh(BASEPOINT.second, resolution)
    return bump_mesh(base, BUBBLE_CENTER, 1.5, 0.15, Y_AXIS)


def split_link() -> tuple[RoundCircle, RoundCircle]:
    """Two unit circles far apart."""
    return (
        RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
        RoundCircle((5.0, 0.0, 0.0), 1.0, (0.0, 1.0, 0.0)),
    )


def tangent_link() -> tuple[RoundCircle, RoundCircle]:
    """The second circle passes through a point of the first one's disc boundary."""
    return (
        RoundCircle((0.0, 0.0, 0.0), 1.0, (0.0, 0.0, 1.0)),
        RoundCircle((2.0, 0.0, 0.0), 1.0, (0.0, 1.0, 0.0)),
    )


def circles_doc(a: RoundCircle, b: RoundCircle) -> dict[str, Any]:
    return {"components": [circle_to_json(a), circle_to_json(b)]}


def link_doc(link: OrientedRoundHopfLink = BASEPOINT) -> dict[str, Any]:
    return link_to_json(link)


def write_json(tmp_path: Path, name: str, doc: Any) -> Path:
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
