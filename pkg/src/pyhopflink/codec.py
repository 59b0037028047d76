"""JSON encoding and decoding for links, patterns, planes, scenes and results.

Decoders raise ``InputError`` subclasses for structurally bad documents; the
geometric constructors they call raise their own errors unchanged.  Encoders
round floats to a fixed number of decimals so equal values print
identically.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from pyhopflink.errors import InputError, MalformedPatternError, MeshError
from pyhopflink.grassmann import Plane2in4, RP2Pair
from pyhopflink.pattern import (
    Chord,
    CircleComponent,
    IntersectionPattern,
    PatternPoint,
    Schedule,
    StraighteningDirective,
    validate_pattern,
)
from pyhopflink.plgeom import TriMesh, disc_mesh
from pyhopflink.quat import Quaternion
from pyhopflink.retraction import PrismPoint
from pyhopflink.roundlink import OrientedRoundHopfLink, RoundCircle, validate_hopf

DEFAULT_DECIMALS = 9


@dataclass(frozen=True, slots=True)
class Scene:
    """A disc mesh, the equator of the ellipsoid family, and an optional height range."""

    mesh: TriMesh
    equator: RoundCircle
    h_range: tuple[float, float] | None = None


def _round(x: float, decimals: int) -> float:
    # adding 0.0 folds -0.0 into 0.0
    return round(float(x), decimals) + 0.0


def _floats(values: Iterable[float], decimals: int) -> list[float]:
    return [_round(v, decimals) for v in values]


def _vector(raw: Any, size: int, what: str) -> list[float]:
    if not isinstance(raw, list) or len(raw) != size:
        raise InputError(f"{what} must be a list of {size} numbers, got {raw!r}")
    try:
        return [float(v) for v in raw]
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what} must contain numbers: {exc}") from exc


def _field(doc: Any, key: str, what: str) -> Any:
    if not isinstance(doc, Mapping):
        raise InputError(f"{what} must be a JSON object")
    if key not in doc:
        raise InputError(f"{what} is missing '{key}'")
    return doc[key]


def dumps(doc: Any) -> str:
    return json.dumps(doc, ensure_ascii=False)


# ---------------------------------------------------------------------------
# Circles and links
# ---------------------------------------------------------------------------


def circle_to_json(c: RoundCircle, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {
        "center": _floats(c.center, decimals),
        "radius": _round(c.radius, decimals),
        "normal": _floats(c.normal, decimals),
    }


def circle_from_json(doc: Any) -> RoundCircle:
    center = _vector(_field(doc, "center", "circle"), 3, "circle center")
    normal = _vector(_field(doc, "normal", "circle"), 3, "circle normal")
    radius = _field(doc, "radius", "circle")
    if not isinstance(radius, int | float) or isinstance(radius, bool):
        raise InputError(f"circle radius must be a number, got {radius!r}")
    return RoundCircle.create(center, float(radius), normal)


def circles_from_json(doc: Any) -> tuple[RoundCircle, RoundCircle]:
    """The two labelled components of a link document, without a linking check."""
    comps = _field(doc, "components", "link")
    if not isinstance(comps, list) or len(comps) != 2:
        raise InputError("link 'components' must hold exactly two circles")
    return circle_from_json(comps[0]), circle_from_json(comps[1])


def link_from_json(doc: Any) -> OrientedRoundHopfLink:
    """Decode and validate a Hopf link (linking number ±1)."""
    return validate_hopf(*circles_from_json(doc))


def link_to_json(link: OrientedRoundHopfLink, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {"components": [circle_to_json(c, decimals) for c in link.components]}


def frame_to_json(frame: npt.ArrayLike, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    """Frame as its three columns ``n1``, ``v``, ``n2`` and the row-major matrix."""
    r = np.asarray(frame, dtype=float)
    return {
        "n1": _floats(r[:, 0], decimals),
        "v": _floats(r[:, 1], decimals),
        "n2": _floats(r[:, 2], decimals),
        "matrix": [_floats(row, decimals) for row in r],
    }


def prism_to_json(point: PrismPoint, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {"quaternion": _floats(point.as_tuple(), decimals)}


def prism_from_json(doc: Any) -> PrismPoint:
    raw = _field(doc, "quaternion", "prism point")
    return PrismPoint(Quaternion.from_array(_vector(raw, 4, "prism quaternion")))


# ---------------------------------------------------------------------------
# Patterns and schedules
# ---------------------------------------------------------------------------


def _chord(raw: Any) -> Chord:
    if not isinstance(raw, list) or len(raw) != 2 or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw
    ):
        raise MalformedPatternError(f"chord must be a pair of integers, got {raw!r}")
    return Chord(raw[0], raw[1])


def pattern_from_json(doc: Any) -> IntersectionPattern:
    """Decode and validate a pattern document."""
    raw_points = _field(doc, "points", "pattern")
    if not isinstance(raw_points, list):
        raise MalformedPatternError("pattern 'points' must be a list")
    points = []
    for raw in raw_points:
        index = _field(raw, "index", "pattern point")
        sign = _field(raw, "sign", "pattern point")
        if not isinstance(index, int) or isinstance(index, bool):
            raise MalformedPatternError(f"point index must be an integer, got {index!r}")
        points.append(PatternPoint(index, str(sign)))
    raw_chords = doc.get("chords", [])
    if not isinstance(raw_chords, list):
        raise MalformedPatternError("pattern 'chords' must be a list")
    raw_circles = doc.get("circles", [])
    if not isinstance(raw_circles, list):
        raise MalformedPatternError("pattern 'circles' must be a list")
    circles = []
    for raw in raw_circles:
        inside = _field(raw, "inside", "pattern circle")
        circles.append(CircleComponent(None if inside is None else _chord(inside)))
    p = IntersectionPattern(
        points=tuple(points),
        chords=tuple(_chord(c) for c in raw_chords),
        alpha=_chord(_field(doc, "alpha", "pattern")),
        circles=tuple(circles),
    )
    validate_pattern(p)
    return p


def pattern_to_json(p: IntersectionPattern) -> dict[str, Any]:
    return {
        "points": [{"index": pt.index, "sign": pt.sign} for pt in p.points],
        "chords": [c.as_list() for c in p.chords],
        "alpha": p.alpha.as_list(),
        "circles": [
            {"inside": None if c.inside is None else c.inside.as_list()} for c in p.circles
        ],
    }


def schedule_to_json(s: Schedule, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {
        "delta": _round(s.delta, decimals),
        "entries": [
            {
                "chord": e.chord.as_list(),
                "start": _round(e.start, decimals),
                "end": _round(e.end, decimals),
            }
            for e in s.entries
        ],
    }


def directive_to_json(d: StraighteningDirective) -> dict[str, Any]:
    return {
        "alpha": d.alpha.as_list(),
        "target": d.target,
        "steps": d.steps,
        "discarded_circles": d.discarded_circles,
    }


# ---------------------------------------------------------------------------
# Planes
# ---------------------------------------------------------------------------


def plane_from_json(doc: Any) -> Plane2in4:
    return Plane2in4.from_arrays(
        _vector(_field(doc, "x", "plane"), 4, "plane x"),
        _vector(_field(doc, "y", "plane"), 4, "plane y"),
    )


def plane_to_json(plane: Plane2in4, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {
        "x": _floats(plane.x.as_tuple(), decimals),
        "y": _floats(plane.y.as_tuple(), decimals),
    }


def xi_to_json(
    pair: tuple[Quaternion, Quaternion], decimals: int = DEFAULT_DECIMALS
) -> dict[str, Any]:
    """``μ`` and ``ν`` as imaginary 3-vectors."""
    m, n = pair
    return {"mu": _floats(m.imag, decimals), "nu": _floats(n.imag, decimals)}


def rp2_to_json(pair: RP2Pair, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {"first": _floats(pair.first, decimals), "second": _floats(pair.second, decimals)}


# ---------------------------------------------------------------------------
# Scenes
# ---------------------------------------------------------------------------


def _mesh_from_json(doc: Any, resolution: int) -> TriMesh:
    """Explicit ``{vertices, triangles, boundary}`` or generated ``{circle[, resolution]}``."""
    if isinstance(doc, Mapping) and "circle" in doc:
        res = doc.get("resolution", resolution)
        if not isinstance(res, int) or isinstance(res, bool):
            raise MeshError(f"mesh resolution must be an integer, got {res!r}")
        return disc_mesh(circle_from_json(doc["circle"]), res)
    vertices = _field(doc, "vertices", "disc_mesh")
    triangles = _field(doc, "triangles", "disc_mesh")
    boundary = _field(doc, "boundary", "disc_mesh")
    try:
        v = np.asarray(vertices, dtype=float)
        t = np.asarray(triangles, dtype=np.int64)
        b = tuple(int(i) for i in boundary)
    except (TypeError, ValueError) as exc:
        raise MeshError(f"disc_mesh arrays are malformed: {exc}") from exc
    return TriMesh(v, t, b)


def scene_from_json(doc: Any, resolution: int = 64) -> Scene:
    """Decode a scene; *resolution* applies when the mesh is generated from a circle."""
    mesh = _mesh_from_json(_field(doc, "disc_mesh", "scene"), resolution)
    equator = circle_from_json(_field(doc, "equator", "scene"))
    if doc.get("h_range") is None:
        return Scene(mesh, equator)
    lo, hi = _vector(doc["h_range"], 2, "scene h_range")
    return Scene(mesh, equator, (lo, hi))


def mesh_to_json(mesh: TriMesh, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    return {
        "vertices": [_floats(row, decimals) for row in mesh.vertices],
        "triangles": mesh.triangles.tolist(),
        "boundary": list(mesh.boundary),
    }


def scene_to_json(scene: Scene, decimals: int = DEFAULT_DECIMALS) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "disc_mesh": mesh_to_json(scene.mesh, decimals),
        "equator": circle_to_json(scene.equator, decimals),
    }
    if scene.h_range is not None:
        doc["h_range"] = _floats(scene.h_range, decimals)
    return doc


def is_pattern_document(doc: Any) -> bool:
    return isinstance(doc, Mapping) and "alpha" in doc and "points" in doc


def jsonl(records: Sequence[Mapping[str, Any]]) -> str:
    return "".join(dumps(r) + "\n" for r in records)
