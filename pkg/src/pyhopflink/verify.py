"""Invariant suites run by ``pyhopflink verify``.

Each suite draws from its own generator spawned from the run seed and
returns a ``SuiteResult``.  ``run_suites`` fans the suites out to worker
threads and gathers them in registry order, so the report is identical for
identical seeds.
"""

from __future__ import annotations

import asyncio
import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from pyhopflink.errors import HopfLinkError, InputError
from pyhopflink.grassmann import (
    Plane2in4,
    basepoint_plane,
    canonical_great_hopf,
    deck_act_plane,
    mu,
    nu,
    orthogonal_complement,
    plane_distance,
    rotate_basis,
    xi,
    xi_deck_signs,
)
from pyhopflink.pattern import (
    contains,
    innermost_order,
    make_schedule,
    random_pattern,
    run_schedule,
)
from pyhopflink.plgeom import (
    Ellipsoid,
    Polyline3,
    circle_polyline,
    crossing_linking_pl,
    disc_mesh,
    extract_intersection_pattern,
    find_transverse_height,
    gauss_linking_pl,
    min_distance,
)
from pyhopflink.quat import (
    ONE,
    K,
    Quaternion,
    axis_angle_rotation,
    conjugation_action,
    is_central_extension,
    lift_path,
    lift_rotation,
)
from pyhopflink.retraction import (
    MIDPOINT,
    DeckElement,
    alpha_loop,
    alpha_s_loop,
    canonical_prism_point,
    g_act,
    in_Y,
    loop_holonomy,
    motion_group,
    retract_to_Y,
    retraction_stages,
    s_loop,
)
from pyhopflink.roundlink import (
    OrientedRoundHopfLink,
    RigidMotion,
    arc_of_intersection,
    basepoint_link,
    dihedral_angle,
    linking_number_round,
    reverse_component,
)
from pyhopflink.sampling import (
    random_link,
    random_plane,
    random_unit_quaternion,
    spawn_generators,
)

logger = logging.getLogger(__name__)

# --- Constants ----------------------------------------------------------------

LOOP_SAMPLES = 1000
HOLONOMY_TOL = 1e-6
XI_UNIT_TOL = 1e-10
XI_BASEPOINT_TOL = 1e-12
SEPARATION = 1e-3
XI_SEPARATION = 1e-6
MAX_REPORTED = 5
EXTRACTION_RESOLUTIONS = (32, 64, 128)

SuiteFn = Callable[[np.random.Generator, int, float], "SuiteResult"]


# --- Result types -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SuiteResult:
    """Outcome of one suite; only the first few failure messages are kept."""

    name: str
    checks: int
    failed: int
    failures: tuple[str, ...] = ()
    elapsed_s: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return self.failed == 0


@dataclass(frozen=True, slots=True)
class VerifyReport:
    seed: int
    n: int
    results: tuple[SuiteResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        """Report text; timing is left out so equal seeds give equal text."""
        out = [f"seed={self.seed} n={self.n}"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{status} {r.name} checks={r.checks} failed={r.failed}")
            out.extend(f"  {msg}" for msg in r.failures)
        out.append("all suites passed" if self.passed else "verification failed")
        return out


class _Tally:
    """Counts checks and keeps the first few failure messages."""

    def __init__(self, name: str) -> None:
        self.name = name
        self.checks = 0
        self.failed = 0
        self.failures: list[str] = []

    def expect(self, ok: bool, message: str) -> None:
        self.checks += 1
        if not ok:
            self.fail(message)

    def fail(self, message: str) -> None:
        self.failed += 1
        if len(self.failures) < MAX_REPORTED:
            self.failures.append(message)

    def result(self) -> SuiteResult:
        return SuiteResult(self.name, self.checks, self.failed, tuple(self.failures))


def _close(a: object, b: object, tol: float) -> bool:
    """Componentwise agreement within *tol* scaled by the magnitude of *a*."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(x))))
    return bool(np.max(np.abs(x - y)) <= tol * scale)


def _link_close(a: OrientedRoundHopfLink, b: OrientedRoundHopfLink, tol: float) -> bool:
    return all(
        _close(c.center, d.center, tol)
        and _close(c.normal, d.normal, tol)
        and _close(c.radius, d.radius, tol)
        for c, d in zip(a.components, b.components)
    )


# --- Suites -------------------------------------------------------------------


def motion_group_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Holonomies of the three deck loops generate a quaternion group of order 8."""
    tally = _Tally("motion_group")
    h_alpha = loop_holonomy(alpha_loop(LOOP_SAMPLES))
    h_s = loop_holonomy(s_loop(LOOP_SAMPLES))
    h_as = loop_holonomy(alpha_s_loop(LOOP_SAMPLES))
    for label, h in (("alpha", h_alpha), ("s", h_s), ("alpha_s", h_as)):
        tally.expect((h * h).is_close(-ONE, HOLONOMY_TOL), f"{label} holonomy squares to {h * h}")
    tally.expect(
        (h_alpha * h_s).is_close(-(h_s * h_alpha), HOLONOMY_TOL),
        "alpha and s holonomies do not anticommute",
    )
    group = motion_group([h_alpha, h_s, h_as])
    tally.expect(len(group) == 8, f"motion group has order {len(group)}")
    tally.expect(is_central_extension(group), "motion group is not a central Z/2 extension")
    return tally.result()


def quotient_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Canonical prism points are identical on deck orbits and agree under translation."""
    tally = _Tally("quotient")
    expected = (ONE + K).scale(1.0 / math.sqrt(2.0))
    base = canonical_prism_point(basepoint_link()).quaternion
    tally.expect(base.is_close(expected, tol), f"basepoint maps to {base.as_tuple()}")
    for k in range(n):
        link = random_link(rng)
        q = canonical_prism_point(link).quaternion
        for g in DeckElement:
            other = canonical_prism_point(g_act(g, link)).quaternion
            tally.expect(other == q, f"sample {k}: deck element {g.name} moves point")
        shift = RigidMotion.translate(rng.uniform(-5.0, 5.0, 3))
        moved = canonical_prism_point(shift.apply_link(link)).quaternion
        tally.expect(moved.is_close(q, tol), f"sample {k}: translation moves point")
    return tally.result()


def retraction_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Each stage keeps what it promises; the composite lands in Y and is idempotent."""
    tally = _Tally("retraction")
    for k in range(n):
        link = random_link(rng)
        theta = dihedral_angle(link)
        radii = (link.first.radius, link.second.radius)
        stages = dict(retraction_stages(link))
        x0, x1 = stages["center_midpoint"], stages["orthogonalize"]
        x2, x3 = stages["equalize_radii"], stages["normalize_radius"]
        x4 = stages["center_arc_endpoints"]

        arc0, arc1, arc2 = (arc_of_intersection(x) for x in (x0, x1, x2))
        tally.expect(_close(arc0.midpoint, MIDPOINT, tol), f"sample {k}: midpoint not centered")
        tally.expect(abs(dihedral_angle(x0) - theta) <= tol, f"sample {k}: translation moved θ")
        tally.expect(
            _close((x0.first.radius, x0.second.radius), radii, tol),
            f"sample {k}: translation changed radii",
        )
        tally.expect(
            abs(dihedral_angle(x1) - math.pi / 2) <= tol, f"sample {k}: θ not orthogonalized"
        )
        tally.expect(
            _close(arc1.first, arc0.first, tol) and _close(arc1.second, arc0.second, tol),
            f"sample {k}: orthogonalize moved the arc",
        )
        tally.expect(
            _close((x1.first.radius, x1.second.radius), radii, tol),
            f"sample {k}: orthogonalize changed radii",
        )
        tally.expect(
            _close(x2.first.radius, x2.second.radius, tol), f"sample {k}: radii not equalized"
        )
        tally.expect(
            _close(arc2.first, arc1.first, tol) and _close(arc2.second, arc1.second, tol),
            f"sample {k}: equalize_radii moved the arc",
        )
        arc3 = arc_of_intersection(x3)
        tally.expect(
            _close((x3.first.radius, x3.second.radius), (1.0, 1.0), tol),
            f"sample {k}: radius not normalized",
        )
        tally.expect(_close(arc3.midpoint, MIDPOINT, tol), f"sample {k}: homothety moved m")
        tally.expect(in_Y(x4, tol), f"sample {k}: retraction misses Y")
        tally.expect(
            _link_close(retract_to_Y(x4), x4, tol), f"sample {k}: retraction not idempotent"
        )
    return tally.result()


def _polygons(link: OrientedRoundHopfLink) -> tuple[Polyline3, Polyline3]:
    """Inscribed polygons fine enough that they stay apart like the circles."""
    sides = 64
    while True:
        a = circle_polyline(link.first, sides)
        b = circle_polyline(link.second, sides)
        sag = max(c.radius for c in link.components) * (1.0 - math.cos(math.pi / sides))
        if min_distance(a, b) > 4.0 * sag or sides >= 1024:
            return a, b
        sides *= 2


def linking_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Round formula, Gauss sum and crossing count agree as integers."""
    tally = _Tally("linking")
    base = basepoint_link()
    links = [base, reverse_component(base, 0), reverse_component(base, 1)]
    links.extend(random_link(rng) for _ in range(n))
    for k, link in enumerate(links):
        for variant in (link, reverse_component(link, 1)):
            expected = linking_number_round(variant.first, variant.second)
            a, b = _polygons(variant)
            gauss = gauss_linking_pl(a, b)
            crossing = crossing_linking_pl(a, b)
            tally.expect(
                expected == gauss == crossing,
                f"link {k}: round {expected}, Gauss {gauss}, crossings {crossing}",
            )
    tally.expect(linking_number_round(base.first, base.second) == 1, "basepoint is not +1")
    return tally.result()


def scheduling_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Random chord diagrams reduce to α with innermost-first, disjoint removals."""
    tally = _Tally("scheduling")
    for k in range(max(1, n // 2)):
        p = random_pattern(rng)
        order = innermost_order(p)
        bad = [
            (c.as_list(), d.as_list())
            for i, c in enumerate(order)
            for d in order[i + 1 :]
            if contains(p, c, d)
        ]
        tally.expect(not bad, f"pattern {k}: chord removed before one it contains: {bad[:1]}")
        schedule = make_schedule(p)
        gaps = all(a.end < b.start for a, b in zip(schedule.entries, schedule.entries[1:]))
        inside = all(0.0 < e.start < e.end < 1.0 for e in schedule.entries)
        tally.expect(gaps and inside, f"pattern {k}: schedule intervals overlap or leave [0,1]")
        final, directive = run_schedule(p)
        tally.expect(
            final.chords == () and final.circles == () and final.alpha == p.alpha,
            f"pattern {k}: schedule leaves {len(final.chords)} chord(s)",
        )
        tally.expect(directive.steps == len(order), f"pattern {k}: directive step count")
    return tally.result()


def extraction_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """The basepoint scene gives one mixed chord at every mesh resolution."""
    tally = _Tally("extraction")
    link = basepoint_link()
    diagrams = []
    for res in EXTRACTION_RESOLUTIONS:
        mesh = disc_mesh(link.second, res)
        h = find_transverse_height(mesh, link.first)
        p = extract_intersection_pattern(mesh, Ellipsoid(link.first, h))
        signs = sorted(p.sign(i) for i in (p.alpha.a, p.alpha.b))
        tally.expect(
            p.chords == () and p.circles == () and signs == ["+", "-"],
            f"resolution {res}: got {len(p.chords)} extra chord(s), {len(p.circles)} circle(s)",
        )
        diagrams.append((tuple((pt.index, pt.sign) for pt in p.points), p.alpha))
    tally.expect(len(set(diagrams)) == 1, "diagram depends on the mesh resolution")
    return tally.result()


def _plane_perturbed(rng: np.random.Generator, plane: Plane2in4, eps: float) -> Plane2in4:
    comp = orthogonal_complement(plane)
    t = rng.uniform(0.0, 2.0 * math.pi)
    z = comp.x.scale(math.cos(t)) + comp.y.scale(math.sin(t))
    return Plane2in4(plane.x.scale(math.cos(eps)) + z.scale(math.sin(eps)), plane.y)


def xi_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """Unit imaginary values, basis invariance, antipodal law, injectivity, deck constancy."""
    tally = _Tally("xi")
    m0, n0 = xi(basepoint_plane())
    expected = (Quaternion(0.0, -1.0, 0.0, 0.0), Quaternion(0.0, 1.0, 0.0, 0.0))
    tally.expect(
        m0.is_close(expected[0], XI_BASEPOINT_TOL) and n0.is_close(expected[1], XI_BASEPOINT_TOL),
        f"basepoint plane maps to {m0.as_tuple()}, {n0.as_tuple()}",
    )
    complement_signs = None
    for k in range(n):
        plane = random_plane(rng)
        m, v = xi(plane)
        tally.expect(
            all(abs(q.w) <= XI_UNIT_TOL and abs(q.norm() - 1.0) <= XI_UNIT_TOL for q in (m, v)),
            f"plane {k}: ξ not unit imaginary",
        )
        rm, rv = xi(rotate_basis(plane, rng.uniform(0.0, 2.0 * math.pi)))
        tally.expect(rm.is_close(m, tol) and rv.is_close(v, tol), f"plane {k}: basis dependence")
        am, av = mu(plane.x, -plane.y), nu(plane.x, -plane.y)
        tally.expect(am == -m and av == -v, f"plane {k}: antipodal law is not exact")

        other = _plane_perturbed(rng, plane, 2.0 * SEPARATION)
        if plane_distance(plane, other) > SEPARATION:
            om, ov = xi(other)
            sep = float(np.linalg.norm(np.concatenate([(om - m).as_array(), (ov - v).as_array()])))
            tally.expect(sep > XI_SEPARATION, f"plane {k}: nearby plane has ξ within {sep:.3g}")

        signs = xi_deck_signs(plane)[DeckElement.S]
        if complement_signs is None:
            complement_signs = signs
        tally.expect(signs == complement_signs, f"plane {k}: complement sign pair {signs}")
        canon = canonical_great_hopf(plane)
        for g in DeckElement:
            moved = canonical_great_hopf(deck_act_plane(g, plane))
            tally.expect(
                _close(moved.first, canon.first, tol) and _close(moved.second, canon.second, tol),
                f"plane {k}: canonical value changes under {g.name}",
            )
    return tally.result()


def double_cover_suite(rng: np.random.Generator, n: int, tol: float) -> SuiteResult:
    """A full turn lifts to −1 and a double turn to +1; lifting inverts the cover."""
    tally = _Tally("double_cover")
    x_axis = np.array([1.0, 0.0, 0.0])
    for turns, expected in ((1, -ONE), (2, ONE)):
        steps = LOOP_SAMPLES * turns
        angles = np.linspace(0.0, 2.0 * math.pi * turns, steps + 1)
        path = [axis_angle_rotation(x_axis, float(t)) for t in angles]
        end = lift_path(path, ONE)[-1]
        tally.expect(end.is_close(expected, tol), f"{turns} turn(s) lift to {end.as_tuple()}")
    for k in range(n):
        q = random_unit_quaternion(rng)
        lifted, neg = lift_rotation(conjugation_action(q))
        tally.expect(
            (lifted.is_close(q, tol) or lifted.is_close(-q, tol)) and neg == -lifted,
            f"sample {k}: lift does not recover ±q",
        )
    return tally.result()


SUITES: dict[str, SuiteFn] = {
    "motion_group": motion_group_suite,
    "quotient": quotient_suite,
    "retraction": retraction_suite,
    "linking": linking_suite,
    "scheduling": scheduling_suite,
    "extraction": extraction_suite,
    "xi": xi_suite,
    "double_cover": double_cover_suite,
}


# --- Runner -------------------------------------------------------------------


def run_suite(
    name: str, fn: SuiteFn, rng: np.random.Generator, n: int, tol: float
) -> SuiteResult:
    """Run one suite; a library error counts as a failed check."""
    start = time.perf_counter()
    try:
        result = fn(rng, n, tol)
    except HopfLinkError as exc:
        result = SuiteResult(name, 1, 1, (f"raised {type(exc).__name__}: {exc}",))
    elapsed = time.perf_counter() - start
    logger.info(
        "Suite %s: %d check(s), %d failed in %.2fs", name, result.checks, result.failed, elapsed
    )
    return SuiteResult(result.name, result.checks, result.failed, result.failures, elapsed)


async def run_suites(
    seed: int, n: int, tol: float = 1e-9, only: Sequence[str] | None = None
) -> VerifyReport:
    """Run the selected suites concurrently and gather them in registry order.

    Raises
    ------
    InputError
        If *n* is below 1 or *only* names an unknown suite.
    """
    if n < 1:
        raise InputError(f"Sample count must be at least 1, got {n}")
    unknown = [s for s in only or () if s not in SUITES]
    if unknown:
        raise InputError(f"Unknown suite(s): {', '.join(unknown)}")
    rngs = dict(zip(SUITES, spawn_generators(seed, len(SUITES))))
    names = [s for s in SUITES if only is None or s in only]
    results = await asyncio.gather(
        *(asyncio.to_thread(run_suite, s, SUITES[s], rngs[s], n, tol) for s in names)
    )
    return VerifyReport(seed, n, tuple(results))
