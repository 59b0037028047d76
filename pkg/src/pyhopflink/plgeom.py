"""Piecewise-linear geometry: polygonal links, meshed discs, and the
intersection pattern of a disc with the ellipsoid family E_h.

E_h has the equator circle C₁ and semi-axis h along its normal.  Its quadric
``(x/r)² + (y/r)² + (z/h)² − 1`` is evaluated in the equator frame; the zero
set on a triangulated disc is traced by marching triangles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import numpy.typing as npt

from pyhopflink.errors import (
    InputError,
    MeshError,
    NoMixedChordError,
    NotTransverseError,
    NoTransverseHeightError,
    TooCloseError,
)
from pyhopflink.pattern import (
    Chord,
    CircleComponent,
    IntersectionPattern,
    PatternPoint,
)
from pyhopflink.roundlink import RoundCircle, sample_circle

logger = logging.getLogger(__name__)

TOO_CLOSE = 1e-6
SELF_TOL = 1e-9
MARGIN_MIN = 1e-6
GAUSS_RESIDUAL = 0.1
HEIGHT_SAMPLES = 64


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, eq=False)
class Polyline3:
    """Ordered vertices in ℝ³, optionally closed.

    Raises
    ------
    MeshError
        On fewer than 3 vertices for a closed curve, repeated consecutive
        vertices, or a self-intersection within 1e-9.
    """

    vertices: npt.NDArray[np.float64]
    closed: bool = True

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"Polyline vertices must be N x 3, got {v.shape}")
        if self.closed and len(v) < 3:
            raise MeshError(f"Closed polyline needs at least 3 vertices, got {len(v)}")
        starts, ends = self.segments()
        if np.any(np.linalg.norm(ends - starts, axis=1) == 0.0):
            raise MeshError("Polyline has repeated consecutive vertices")
        if self.min_self_distance() <= SELF_TOL:
            raise MeshError("Polyline intersects itself")

    def __len__(self) -> int:
        return len(self.vertices)

    def segments(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def min_self_distance(self) -> float:
        """Smallest distance between non-adjacent segments."""
        starts, ends = self.segments()
        n = len(starts)
        i, j = np.triu_indices(n, k=2)
        keep = ~((i == 0) & (j == n - 1)) if self.closed else np.ones(len(i), dtype=bool)
        i, j = i[keep], j[keep]
        if len(i) == 0:
            return math.inf
        d = _segment_distances(starts[i], ends[i], starts[j], ends[j])
        return float(d.min())

    def reversed(self) -> Polyline3:
        return Polyline3(self.vertices[::-1].copy(), self.closed)


@dataclass(frozen=True, slots=True, eq=False)
class TriMesh:
    """Triangulated disc with an ordered boundary loop.

    Raises
    ------
    MeshError
        If the Euler characteristic is not 1, an edge has more than two
        triangles, or the boundary edges do not form the given loop.
    """

    vertices: npt.NDArray[np.float64]
    triangles: npt.NDArray[np.int64]
    boundary: tuple[int, ...]
    _edges: dict[tuple[int, int], list[int]] = field(init=False, repr=False)
    _edge_array: npt.NDArray[np.int64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "boundary", tuple(int(b) for b in self.boundary))
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError(f"Mesh vertices must be N x 3, got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3 or len(t) == 0:
            raise MeshError(f"Mesh triangles must be a nonempty F x 3 array, got {t.shape}")
        if t.min() < 0 or t.max() >= len(v):
            raise MeshError("Triangle references a missing vertex")

        edges: dict[tuple[int, int], list[int]] = {}
        for k, tri in enumerate(t.tolist()):
            if len(set(tri)) != 3:
                raise MeshError(f"Triangle {k} repeats a vertex")
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                edges.setdefault((min(a, b), max(a, b)), []).append(k)
        object.__setattr__(self, "_edges", edges)
        object.__setattr__(self, "_edge_array", np.array(sorted(edges), dtype=np.int64))

        errors: list[str] = []
        if any(len(owners) > 2 for owners in edges.values()):
            errors.append("an edge is shared by more than two triangles")
        chi = len(v) - len(edges) + len(t)
        if chi != 1:
            errors.append(f"Euler characteristic is {chi}, expected 1")
        loop = self.boundary
        loop_edges = {
            (min(a, b), max(a, b)) for a, b in zip(loop, loop[1:] + loop[:1])
        }
        open_edges = {e for e, owners in edges.items() if len(owners) == 1}
        if len(loop) < 3 or len(set(loop)) != len(loop) or loop_edges != open_edges:
            errors.append("boundary loop does not match the boundary edges")
        if errors:
            raise MeshError("Not a triangulated disc: " + "; ".join(errors))

    @property
    def edges(self) -> dict[tuple[int, int], list[int]]:
        """Undirected edge ``(lo, hi)`` → indices of incident triangles."""
        return self._edges

    @property
    def edge_array(self) -> npt.NDArray[np.int64]:
        """``E x 2`` array of undirected edges, sorted."""
        return self._edge_array

    def boundary_polyline(self) -> Polyline3:
        return Polyline3(self.vertices[list(self.boundary)], closed=True)


@dataclass(frozen=True, slots=True)
class Ellipsoid:
    """E_h with equator circle *equator* and polar semi-axis *height*."""

    equator: RoundCircle
    height: float

    def __post_init__(self) -> None:
        if not self.height > 0:
            raise InputError(f"Ellipsoid height must be positive, got {self.height}")

    def local(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Coordinates in the equator frame ``(u, w, n)`` centered on the equator."""
        u, w = self.equator.basis()
        basis = np.stack([u, w, self.equator.n])
        return (np.asarray(points, dtype=float) - self.equator.p) @ basis.T

    def quadric(self, points: npt.ArrayLike) -> npt.NDArray[np.float64]:
        loc = self.local(points)
        r = self.equator.radius
        return (
            (loc[..., 0] / r) ** 2 + (loc[..., 1] / r) ** 2 + (loc[..., 2] / self.height) ** 2 - 1.0
        )


# ---------------------------------------------------------------------------
# Linking numbers of polygons
# ---------------------------------------------------------------------------


def _segment_distances(
    p0: npt.NDArray[np.float64],
    p1: npt.NDArray[np.float64],
    q0: npt.NDArray[np.float64],
    q1: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """Row-wise distance between segments ``[p0, p1]`` and ``[q0, q1]``."""
    u = p1 - p0
    v = q1 - q0
    w0 = p0 - q0
    a = np.einsum("ij,ij->i", u, u)
    b = np.einsum("ij,ij->i", u, v)
    c = np.einsum("ij,ij->i", v, v)
    d = np.einsum("ij,ij->i", u, w0)
    e = np.einsum("ij,ij->i", v, w0)
    den = a * c - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 1e-14 * a * c, np.clip((b * e - c * d) / den, 0.0, 1.0), 0.0)
        t = (b * s + e) / c
        low = t < 0.0
        high = t > 1.0
        s = np.where(low, np.clip(-d / a, 0.0, 1.0), s)
        s = np.where(high, np.clip((b - d) / a, 0.0, 1.0), s)
        t = np.clip(t, 0.0, 1.0)
    diff = w0 + s[:, None] * u - t[:, None] * v
    return np.asarray(np.linalg.norm(diff, axis=1))


def min_distance(a: Polyline3, b: Polyline3) -> float:
    sa, ea = a.segments()
    sb, eb = b.segments()
    i, j = np.meshgrid(np.arange(len(sa)), np.arange(len(sb)), indexing="ij")
    i, j = i.ravel(), j.ravel()
    return float(_segment_distances(sa[i], ea[i], sb[j], eb[j]).min())


def gauss_linking_value(a: Polyline3, b: Polyline3) -> float:
    """Gauss double sum over segment pairs as a real number.

    Raises
    ------
    TooCloseError
        If the polygons come within 1e-6 of each other.
    """
    gap = min_distance(a, b)
    if gap < TOO_CLOSE:
        raise TooCloseError(f"Polylines are {gap:.3g} apart, below {TOO_CLOSE}")
    ks, ks_next = a.segments()
    ls, ls_next = b.segments()
    # pairs (i over a, j over b)
    k0 = ks[:, None, :]
    k1 = ks_next[:, None, :]
    l0 = ls[None, :, :]
    l1 = ls_next[None, :, :]
    va = l0 - k0
    vb = l0 - k1
    vc = l1 - k1
    vd = l1 - k0
    p = np.einsum("ijk,ijk->ij", va, np.cross(vb, vc))
    an = np.linalg.norm(va, axis=2)
    bn = np.linalg.norm(vb, axis=2)
    cn = np.linalg.norm(vc, axis=2)
    dn = np.linalg.norm(vd, axis=2)

    def dot(x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.asarray(np.einsum("ijk,ijk->ij", x, y))

    d1 = an * bn * cn + dot(va, vb) * cn + dot(vb, vc) * an + dot(vc, va) * bn
    d2 = an * dn * cn + dot(va, vd) * cn + dot(vd, vc) * an + dot(vc, va) * dn
    total = np.arctan2(p, d1) + np.arctan2(p, d2)
    return float(total.sum() / (2.0 * math.pi))


def gauss_linking_pl(a: Polyline3, b: Polyline3) -> int:
    """Gauss linking number of two closed polygons, rounded to an integer.

    Raises
    ------
    TooCloseError
        If the polygons come within 1e-6 of each other.
    NotTransverseError
        If the sum is more than 0.1 away from an integer.
    """
    value = gauss_linking_value(a, b)
    lk = round(value)
    if abs(value - lk) >= GAUSS_RESIDUAL:
        raise NotTransverseError(f"Gauss sum {value:.4f} is not near an integer")
    return int(lk)


_PROJECTION_DIRECTIONS = (
    (0.2672612419124244, 0.5345224838248488, 0.8017837257372732),
    (0.8164965809277261, -0.4082482904638631, 0.4082482904638631),
    (-0.3015113445777636, 0.9045340337332909, 0.3015113445777636),
    (0.5773502691896258, 0.5773502691896258, -0.5773502691896258),
)


def _crossing_sum(a: Polyline3, b: Polyline3, d: npt.NDArray[np.float64]) -> int | None:
    """Signed crossings where *a* passes over *b* seen along *d*; None if not generic."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(d, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    sa, ea = a.segments()
    sb, eb = b.segments()
    pa, qa = np.stack([sa @ e1, sa @ e2], 1), np.stack([ea @ e1, ea @ e2], 1)
    pb, qb = np.stack([sb @ e1, sb @ e2], 1), np.stack([eb @ e1, eb @ e2], 1)
    ra = (qa - pa)[:, None, :]
    rb = (qb - pb)[None, :, :]
    off = pb[None, :, :] - pa[:, None, :]
    den = ra[..., 0] * rb[..., 1] - ra[..., 1] * rb[..., 0]
    parallel = np.abs(den) < 1e-12
    den = np.where(parallel, 1.0, den)
    s = (off[..., 0] * rb[..., 1] - off[..., 1] * rb[..., 0]) / den
    t = (off[..., 0] * ra[..., 1] - off[..., 1] * ra[..., 0]) / den
    eps = 1e-9
    near_end = ((np.abs(s) < eps) | (np.abs(s - 1) < eps)) & (t > -eps) & (t < 1 + eps)
    near_end |= ((np.abs(t) < eps) | (np.abs(t - 1) < eps)) & (s > -eps) & (s < 1 + eps)
    near_end &= ~parallel
    if np.any(near_end):
        return None
    hit = (s > 0) & (s < 1) & (t > 0) & (t < 1) & ~parallel
    total = 0
    ta = ea - sa
    tb = eb - sb
    for i, j in zip(*np.nonzero(hit)):
        ha = float((sa[i] + s[i, j] * ta[i]) @ d)
        hb = float((sb[j] + t[i, j] * tb[j]) @ d)
        if ha > hb:
            total += 1 if float(np.cross(ta[i], tb[j]) @ d) > 0 else -1
    return total


def crossing_linking_pl(a: Polyline3, b: Polyline3) -> int:
    """Linking number as the signed count of crossings of *a* over *b*.

    Projects along a fixed list of generic directions, retrying the next
    when a crossing falls on a segment endpoint or segments project
    parallel.

    Raises
    ------
    NotTransverseError
        If no direction gives a generic projection.
    """
    for k, raw in enumerate(_PROJECTION_DIRECTIONS):
        d = np.array(raw)
        result = _crossing_sum(a, b, d)
        if result is not None:
            return result
        logger.warning("Projection direction %d is not generic, retrying", k)
    raise NotTransverseError("No generic projection direction found")


def circle_polyline(c: RoundCircle, n: int = 64) -> Polyline3:
    """Inscribed regular *n*-gon following the circle's orientation."""
    return Polyline3(sample_circle(c, n), closed=True)


# ---------------------------------------------------------------------------
# Meshes
# ---------------------------------------------------------------------------


def _ring(count: int, radius: float, c: RoundCircle) -> npt.NDArray[np.float64]:
    u, w = c.basis()
    ang = 2.0 * np.pi * (np.arange(count) + 0.25) / count
    return c.p + radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), w))


def _zipper(
    inner: list[int], outer: list[int]
) -> list[tuple[int, int, int]]:
    """Stitch two concentric rings by merging their angular orders."""
    m, n = len(inner), len(outer)
    tris: list[tuple[int, int, int]] = []
    i = j = 0
    while i < m or j < n:
        next_inner = (i + 1.25) / m
        next_outer = (j + 1.25) / n
        if j == n or (i < m and next_inner < next_outer):
            tris.append((inner[i % m], outer[j % n], inner[(i + 1) % m]))
            i += 1
        else:
            tris.append((inner[i % m], outer[j % n], outer[(j + 1) % n]))
            j += 1
    return tris


def disc_mesh(circle: RoundCircle, resolution: int = 64) -> TriMesh:
    """Ring triangulation of the flat disc of *circle* with *resolution* boundary vertices.

    Rings sit at radii ``k r / R`` for ``R = max(2, resolution // 4)``; there is
    no center vertex.  The boundary loop follows the circle's orientation.
    """
    if resolution < 8:
        raise MeshError(f"Mesh resolution must be at least 8, got {resolution}")
    n_rings = max(2, resolution // 4)
    counts = []
    for k in range(1, n_rings + 1):
        size = max(6, 2 * round(resolution * k / (2 * n_rings)))
        counts.append(size)
    counts[-1] = resolution

    vertices: list[npt.NDArray[np.float64]] = []
    rings: list[list[int]] = []
    start = 0
    for k, count in enumerate(counts, start=1):
        vertices.append(_ring(count, circle.radius * k / n_rings, circle))
        rings.append(list(range(start, start + count)))
        start += count

    first = rings[0]
    tris: list[tuple[int, int, int]] = [
        (first[0], first[j], first[j + 1]) for j in range(1, len(first) - 1)
    ]
    for inner, outer in zip(rings, rings[1:]):
        tris.extend(_zipper(inner, outer))
    return TriMesh(np.vstack(vertices), np.array(tris, dtype=np.int64), tuple(rings[-1]))


def bump_mesh(
    mesh: TriMesh,
    center: npt.ArrayLike,
    amplitude: float,
    sigma: float,
    direction: npt.ArrayLike,
) -> TriMesh:
    """Displace vertices by a Gaussian bump ``A exp(−|x−c|²/2σ²)`` along *direction*."""
    c = np.asarray(center, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    dist2 = np.sum((mesh.vertices - c) ** 2, axis=1)
    shift = amplitude * np.exp(-dist2 / (2.0 * sigma**2))
    return TriMesh(mesh.vertices + shift[:, None] * d, mesh.triangles.copy(), mesh.boundary)


def mesh_euler_characteristic(mesh: TriMesh) -> int:
    return len(mesh.vertices) - len(mesh.edges) + len(mesh.triangles)


# ---------------------------------------------------------------------------
# Transversality and height selection
# ---------------------------------------------------------------------------


def transversality_margin(mesh: TriMesh, ellipsoid: Ellipsoid) -> float:
    """Smallest ``|f|`` at vertices next to the zero set of the quadric *f*.

    Vertices with ``|f| ≤ 1e-6`` always count, so a tangency at a vertex
    gives a small margin.  Returns +inf when the zero set misses the mesh.
    """
    f = ellipsoid.quadric(mesh.vertices)
    sign = np.sign(f)
    ea, eb = mesh.edge_array[:, 0], mesh.edge_array[:, 1]
    change = sign[ea] != sign[eb]
    margin = math.inf
    if np.any(change):
        margin = float(np.minimum(np.abs(f[ea[change]]), np.abs(f[eb[change]])).min())
    near = float(np.min(np.abs(f)))
    if near <= MARGIN_MIN:
        margin = min(margin, near)
    return margin


def _scan(mesh: TriMesh, equator: RoundCircle, heights: npt.NDArray[np.float64]) -> list[float]:
    return [transversality_margin(mesh, Ellipsoid(equator, float(h))) for h in heights]


def find_transverse_height(
    mesh: TriMesh,
    equator: RoundCircle,
    h_min: float = 0.5,
    h_max: float = 2.0,
    samples: int = HEIGHT_SAMPLES,
) -> float:
    """Height in ``[h_min, h_max]`` maximizing the transversality margin.

    Scans a geometric grid, then refines once between the neighbours of
    the best sample.  If the zero set misses the mesh at every sample the
    midpoint of the range is returned.

    Raises
    ------
    NoTransverseHeightError
        If the range is empty or the best margin is at most 1e-6.
    """
    if not 0 < h_min < h_max:
        raise NoTransverseHeightError(f"Need 0 < h_min < h_max, got [{h_min}, {h_max}]")
    grid = np.geomspace(h_min, h_max, samples)
    margins = _scan(mesh, equator, grid)
    if all(math.isinf(m) for m in margins):
        logger.info("Zero set misses the mesh for every height; using the midpoint")
        return (h_min + h_max) / 2.0
    k = int(np.argmax(margins))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, samples - 1)]
    fine = np.geomspace(lo, hi, samples)
    fine_margins = _scan(mesh, equator, fine)
    j = int(np.argmax(fine_margins))
    best_h, best = (float(fine[j]), fine_margins[j])
    if margins[k] > best:
        best_h, best = float(grid[k]), margins[k]
    if best <= MARGIN_MIN:
        raise NoTransverseHeightError(f"Best transversality margin {best:.3g} is too small")
    logger.info("Selected height h=%.6f with margin %.3g", best_h, best)
    return best_h


# ---------------------------------------------------------------------------
# Marching triangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class _Endpoint:
    position: float
    sign: str


def extract_intersection_pattern(
    mesh: TriMesh, ellipsoid: Ellipsoid
) -> IntersectionPattern:
    """Intersection pattern of the zero set of the quadric on *mesh*.

    Open curves become chords between boundary points signed by the
    hemisphere (``+`` above the equator plane); closed curves become
    circles tagged with the innermost chord region containing them.

    Raises
    ------
    NotTransverseError
        If the transversality margin is at most 1e-6.
    NoMixedChordError
        If there is not exactly one chord with opposite-sign endpoints.
    """
    margin = transversality_margin(mesh, ellipsoid)
    if margin <= MARGIN_MIN:
        raise NotTransverseError(f"Mesh is not transverse to the ellipsoid (margin {margin:.3g})")
    f = ellipsoid.quadric(mesh.vertices)
    positive = f > 0
    crossing = {e for e in mesh.edges if positive[e[0]] != positive[e[1]]}

    graph: nx.Graph = nx.Graph()
    graph.add_nodes_from(crossing)
    for tri in mesh.triangles.tolist():
        cut = [
            (min(a, b), max(a, b))
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))
            if (min(a, b), max(a, b)) in crossing
        ]
        if len(cut) == 2:
            graph.add_edge(cut[0], cut[1])

    loop = mesh.boundary
    boundary_slot = {
        (min(a, b), max(a, b)): (k, a) for k, (a, b) in enumerate(zip(loop, loop[1:] + loop[:1]))
    }

    def endpoint(edge: tuple[int, int]) -> _Endpoint:
        if edge not in boundary_slot:
            raise NotTransverseError(f"Zero set ends inside the disc at edge {edge}")
        k, start = boundary_slot[edge]
        a, b = edge
        t = float(f[a] / (f[a] - f[b]))
        point = mesh.vertices[a] + t * (mesh.vertices[b] - mesh.vertices[a])
        frac = t if start == a else 1.0 - t
        z = float(ellipsoid.local(point)[2])
        return _Endpoint(k + frac, "+" if z > 0 else "-")

    arcs: list[tuple[_Endpoint, _Endpoint]] = []
    loops: list[set[tuple[int, int]]] = []
    for comp in nx.connected_components(graph):
        ends = [e for e in comp if graph.degree(e) == 1]
        if len(ends) == 2:
            arcs.append((endpoint(ends[0]), endpoint(ends[1])))
        elif not ends:
            loops.append(set(comp))
        else:
            raise NotTransverseError("Zero set component has a dangling end inside the disc")

    ordered = sorted((e.position, e.sign, idx) for idx, pair in enumerate(arcs) for e in pair)
    index_of: dict[tuple[int, float], int] = {}
    points: list[PatternPoint] = []
    for i, (pos, sign, idx) in enumerate(ordered):
        index_of[(idx, pos)] = i
        points.append(PatternPoint(i, sign))
    chords = [Chord(index_of[(idx, a.position)], index_of[(idx, b.position)]) for idx, (a, b) in
              enumerate(arcs)]
    mixed = [c for c in chords if points[c.a].sign != points[c.b].sign]
    if len(mixed) != 1:
        raise NoMixedChordError(f"Expected one mixed-sign chord, found {len(mixed)}")
    alpha = mixed[0]
    others = tuple(c for c in chords if c != alpha)
    pattern = IntersectionPattern(tuple(points), others, alpha)

    chord_edges = {
        e for comp in nx.connected_components(graph) if any(graph.degree(x) == 1 for x in comp)
        for e in comp
    }
    positions = [pos for pos, _, _ in ordered]
    circles = tuple(
        CircleComponent(_tag_circle(mesh, pattern, chord_edges, comp, positions))
        for comp in loops
    )
    logger.info(
        "Extracted %d chord(s) and %d circle(s) at h=%.6f",
        len(chords),
        len(circles),
        ellipsoid.height,
    )
    return IntersectionPattern(pattern.points, pattern.chords, pattern.alpha, circles)


def _tag_circle(
    mesh: TriMesh,
    pattern: IntersectionPattern,
    chord_edges: set[tuple[int, int]],
    circle: set[tuple[int, int]],
    positions: list[float],
) -> Chord | None:
    """Innermost chord whose region holds *circle*, found through the mesh face it lies in."""
    faces: nx.Graph = nx.Graph()
    faces.add_nodes_from(range(len(mesh.vertices)))
    faces.add_edges_from(e for e in mesh.edges if e not in chord_edges)
    seed = next(iter(circle))[0]
    region = nx.node_connected_component(faces, seed)
    slot = {v: k for k, v in enumerate(mesh.boundary)}
    touching = sorted(slot[v] for v in region if v in slot)
    if not touching:
        raise NotTransverseError("Circle region does not reach the boundary")
    where = float(touching[0])
    # pattern point i sits at positions[i]; map the boundary slot onto point order
    rank = float(np.searchsorted(positions, where)) - 0.5
    holders = [c for c in pattern.chords if pattern.in_region(c, rank)]
    if not holders:
        return None
    return min(holders, key=lambda c: (len(pattern.side_points(c)), c))
