"""Combinatorics of intersection patterns.

A pattern is a signed chord diagram on the boundary circle of a disc:
boundary points carry a hemisphere sign, chords pair the points without
crossing, exactly one chord (α) joins opposite signs, and closed
intersection curves are tagged with the innermost chord region containing
them.  Chords are removed innermost first on a fixed time schedule; the
final straightening of α is emitted as a directive.
"""

from __future__ import annotations

import heapq
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field, replace

import numpy as np

from pyhopflink.errors import (
    CrossingChordsError,
    MalformedPatternError,
    NotInnermostError,
    WrongAlphaCountError,
)

logger = logging.getLogger(__name__)

SIGNS = ("+", "-")


@dataclass(frozen=True, slots=True, order=True)
class Chord:
    """A chord joining boundary points ``a < b``; identity is the endpoint pair."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise MalformedPatternError(f"Chord endpoints must differ, got ({self.a}, {self.b})")
        if self.a > self.b:
            lo, hi = self.b, self.a
            object.__setattr__(self, "a", lo)
            object.__setattr__(self, "b", hi)

    def separates(self, i: int) -> bool:
        """Whether point *i* lies strictly between the endpoints."""
        return self.a < i < self.b

    def crosses(self, other: Chord) -> bool:
        return self.separates(other.a) != self.separates(other.b) and not (
            other.a in (self.a, self.b) or other.b in (self.a, self.b)
        )

    def as_list(self) -> list[int]:
        return [self.a, self.b]


@dataclass(frozen=True, slots=True)
class PatternPoint:
    index: int
    sign: str


@dataclass(frozen=True, slots=True)
class CircleComponent:
    """A closed intersection curve; ``inside`` is the innermost chord whose region holds it."""

    inside: Chord | None = None


@dataclass(frozen=True, slots=True)
class IntersectionPattern:
    """Signed chord diagram with a designated mixed chord α.

    ``chords`` excludes α.  Points are kept in boundary order by index.
    """

    points: tuple[PatternPoint, ...]
    chords: tuple[Chord, ...]
    alpha: Chord
    circles: tuple[CircleComponent, ...] = ()
    _signs: dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple(sorted(self.points, key=lambda p: p.index))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "chords", tuple(sorted(self.chords)))
        object.__setattr__(self, "_signs", {p.index: p.sign for p in pts})

    def sign(self, i: int) -> str:
        return self._signs[i]

    def is_mixed(self, c: Chord) -> bool:
        return self._signs[c.a] != self._signs[c.b]

    def all_chords(self) -> tuple[Chord, ...]:
        return (self.alpha, *self.chords)

    def side_points(self, c: Chord) -> frozenset[int]:
        """Point indices strictly inside C(c), the side of *c* away from α."""
        inner = frozenset(p.index for p in self.points if c.separates(p.index))
        if c.separates(self.alpha.a):
            return frozenset(p.index for p in self.points if p.index not in (c.a, c.b)) - inner
        return inner

    def in_region(self, c: Chord, position: float) -> bool:
        """Whether boundary *position* (not an endpoint) lies on the C(c) side of *c*."""
        inside = c.a < position < c.b
        alpha_inside = c.separates(self.alpha.a)
        return inside != alpha_inside


@dataclass(frozen=True, slots=True)
class ScheduleEntry:
    chord: Chord
    start: float
    end: float


@dataclass(frozen=True, slots=True)
class Schedule:
    """Removal times: entry ``i`` runs on ``[i/(m+1), i/(m+1) + δ]``."""

    entries: tuple[ScheduleEntry, ...]
    delta: float

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, slots=True)
class StraighteningDirective:
    """Terminal instruction: straighten α to the poles axis."""

    alpha: Chord
    target: str = "poles-axis"
    steps: int = 0
    discarded_circles: int = 0


# ---------------------------------------------------------------------------
# Validation and nesting
# ---------------------------------------------------------------------------


def validate_pattern(p: IntersectionPattern) -> None:
    """Check the perfect matching, planarity, and the unique mixed chord.

    Raises
    ------
    MalformedPatternError
        If points and chords do not form a perfect matching, a sign is not
        ``+``/``-``, or a circle names an unknown chord.
    CrossingChordsError
        If two chords cross.
    WrongAlphaCountError
        If the number of mixed-sign chords is not exactly one.
    """
    indices = [pt.index for pt in p.points]
    if len(set(indices)) != len(indices):
        raise MalformedPatternError("Duplicate point indices")
    for pt in p.points:
        if pt.sign not in SIGNS:
            raise MalformedPatternError(f"Point {pt.index} has sign {pt.sign!r}")
    chords = p.all_chords()
    used = [i for c in chords for i in (c.a, c.b)]
    if sorted(used) != sorted(indices):
        raise MalformedPatternError("Chords do not match the boundary points one-to-one")
    for i, c in enumerate(chords):
        for d in chords[i + 1 :]:
            if c.crosses(d):
                raise CrossingChordsError(f"Chords {c.as_list()} and {d.as_list()} cross")
    mixed = sum(1 for c in chords if p.is_mixed(c))
    if mixed != 1 or not p.is_mixed(p.alpha):
        raise WrongAlphaCountError(f"Expected exactly one mixed chord (alpha), found {mixed}")
    known = set(p.chords)
    for circle in p.circles:
        if circle.inside is not None and circle.inside not in known:
            raise MalformedPatternError(f"Circle tagged with unknown chord {circle.inside}")


def contains(p: IntersectionPattern, outer: Chord, inner: Chord) -> bool:
    """Brute force: ``C(inner) ⊊ C(outer)``."""
    if outer == inner:
        return False
    side = p.side_points(outer)
    return inner.a in side and inner.b in side


def nesting_forest(p: IntersectionPattern) -> dict[Chord, Chord | None]:
    """Parent of each non-α chord: the smallest chord region containing it."""
    parents: dict[Chord, Chord | None] = {}
    sizes = {c: len(p.side_points(c)) for c in p.chords}
    for c in p.chords:
        holders = [d for d in p.chords if contains(p, d, c)]
        parents[c] = min(holders, key=lambda d: (sizes[d], d)) if holders else None
    return parents


def innermost_order(p: IntersectionPattern) -> list[Chord]:
    """Children before parents; ties go to the smallest endpoint."""
    parents = nesting_forest(p)
    pending = {c: 0 for c in p.chords}
    for parent in parents.values():
        if parent is not None:
            pending[parent] += 1
    ready = [(c.a, c) for c, n in pending.items() if n == 0]
    heapq.heapify(ready)
    order: list[Chord] = []
    while ready:
        _, c = heapq.heappop(ready)
        order.append(c)
        parent = parents[c]
        if parent is not None:
            pending[parent] -= 1
            if pending[parent] == 0:
                heapq.heappush(ready, (parent.a, parent))
    return order


def is_innermost(p: IntersectionPattern, c: Chord) -> bool:
    return not any(contains(p, c, d) for d in p.chords)


# ---------------------------------------------------------------------------
# Scheduling and removal
# ---------------------------------------------------------------------------


def make_schedule(p: IntersectionPattern) -> Schedule:
    """Chord ``i`` of the innermost order starts at ``s = i/(m+1)``.

    δ is half the gap between consecutive start times, so the intervals are
    pairwise disjoint.
    """
    order = innermost_order(p)
    m = len(order)
    if m == 0:
        return Schedule((), 0.0)
    step = 1.0 / (m + 1)
    delta = step / 2.0
    entries = tuple(
        ScheduleEntry(c, (i + 1) * step, (i + 1) * step + delta) for i, c in enumerate(order)
    )
    return Schedule(entries, delta)


def simulate_removal(p: IntersectionPattern, c: Chord) -> IntersectionPattern:
    """Remove the innermost chord *c* together with the circles inside C(c).

    Raises
    ------
    NotInnermostError
        If *c* is α or still has a chord nested in its region.
    MalformedPatternError
        If *c* is not a chord of *p*.
    """
    if c == p.alpha:
        raise NotInnermostError("The mixed chord alpha is never removed")
    if c not in p.chords:
        raise MalformedPatternError(f"Chord {c.as_list()} is not in the pattern")
    if not is_innermost(p, c):
        raise NotInnermostError(f"Chord {c.as_list()} still contains other chords")
    return replace(
        p,
        points=tuple(pt for pt in p.points if pt.index not in (c.a, c.b)),
        chords=tuple(d for d in p.chords if d != c),
        circles=tuple(circle for circle in p.circles if circle.inside != c),
    )


def run_schedule(p: IntersectionPattern) -> tuple[IntersectionPattern, StraighteningDirective]:
    """Execute the schedule and return ``{α}`` with the straightening directive.

    Circles outside every chord region are dropped at the end and counted in
    the directive.
    """
    validate_pattern(p)
    schedule = make_schedule(p)
    current = p
    for entry in schedule.entries:
        current = simulate_removal(current, entry.chord)
        logger.debug("Removed chord %s at s=%.4f", entry.chord.as_list(), entry.start)
    free = len(current.circles)
    if free:
        logger.warning("Discarding %d circle(s) outside every chord region", free)
        current = replace(current, circles=())
    logger.info("Schedule finished after %d removal(s)", len(schedule))
    directive = StraighteningDirective(current.alpha, steps=len(schedule), discarded_circles=free)
    return current, directive


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def make_pattern(
    signs: Iterable[str],
    chords: Iterable[tuple[int, int]],
    alpha: tuple[int, int],
    circles: Iterable[tuple[int, int] | None] = (),
) -> IntersectionPattern:
    """Build and validate a pattern with points ``0..len(signs)-1``."""
    p = IntersectionPattern(
        points=tuple(PatternPoint(i, s) for i, s in enumerate(signs)),
        chords=tuple(Chord(a, b) for a, b in chords),
        alpha=Chord(*alpha),
        circles=tuple(CircleComponent(None if c is None else Chord(*c)) for c in circles),
    )
    validate_pattern(p)
    return p


def random_pattern(
    rng: np.random.Generator, max_chords: int = 20, max_circles: int = 10
) -> IntersectionPattern:
    """Random planar signed chord diagram with one mixed chord.

    Draws up to *max_chords* chords besides α from a random balanced
    bracket word, and up to *max_circles* circles tagged uniformly among the
    chord regions and the free region.
    """
    m = int(rng.integers(0, max_chords + 1))
    pairs: list[tuple[int, int]] = []
    stack: list[int] = []
    opens = closes = m + 1
    pos = 0
    while opens or closes:
        if opens and (not stack or rng.random() < 0.5):
            stack.append(pos)
            opens -= 1
        else:
            pairs.append((stack.pop(), pos))
            closes -= 1
        pos += 1
    alpha_idx = int(rng.integers(0, len(pairs)))
    signs = [""] * pos
    for k, (a, b) in enumerate(pairs):
        if k == alpha_idx:
            first = SIGNS[int(rng.integers(0, 2))]
            signs[a], signs[b] = first, "-" if first == "+" else "+"
        else:
            s = SIGNS[int(rng.integers(0, 2))]
            signs[a] = signs[b] = s
    others = [pr for k, pr in enumerate(pairs) if k != alpha_idx]
    n_circles = int(rng.integers(0, max_circles + 1))
    tags: list[tuple[int, int] | None] = []
    for _ in range(n_circles):
        k = int(rng.integers(0, len(others) + 1))
        tags.append(others[k] if k < len(others) else None)
    return make_pattern(signs, others, pairs[alpha_idx], tags)
