"""Planar primitives: points, loops, contours, and their validation.

Coordinates are millimeters in the slice plane, double precision throughout.
Loops are closed implicitly (the last vertex connects back to the first).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import DegenerateInput, NonSimpleLoop

# Below this absolute shoelace area a polygon is treated as collapsed.
AREA_EPS = 1e-12
# Distance below which a point counts as lying on a segment.
TOUCH_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DegenerateInput(f"non-finite coordinate ({self.x}, {self.y})")


class Winding(str, Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"


def cross(o: Point2, a: Point2, b: Point2) -> float:
    """Z component of (a-o) x (b-o); positive when o->a->b turns left."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def signed_area(vertices: Sequence[Point2]) -> float:
    """Shoelace area, positive for counterclockwise traversal."""
    acc = []
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        acc.append(a.x * b.y - b.x * a.y)
    return 0.5 * math.fsum(acc)


def polygon_centroid(vertices: Sequence[Point2]) -> Point2:
    """Area centroid of a simple polygon.

    Raises DegenerateInput when the polygon has (near) zero area; callers
    that want the vertex-mean fallback should catch it.
    """
    a = signed_area(vertices)
    if abs(a) < AREA_EPS:
        raise DegenerateInput("polygon area below tolerance")
    n = len(vertices)
    cx = []
    cy = []
    for i in range(n):
        p = vertices[i]
        q = vertices[(i + 1) % n]
        w = p.x * q.y - q.x * p.y
        cx.append((p.x + q.x) * w)
        cy.append((p.y + q.y) * w)
    f = 1.0 / (6.0 * a)
    return Point2(f * math.fsum(cx), f * math.fsum(cy))


def vertex_mean(vertices: Sequence[Point2]) -> Point2:
    n = len(vertices)
    return Point2(
        math.fsum(p.x for p in vertices) / n,
        math.fsum(p.y for p in vertices) / n,
    )


def _seg_point_distance(p: Point2, a: Point2, b: Point2) -> float:
    dx = b.x - a.x
    dy = b.y - a.y
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return math.hypot(p.x - a.x, p.y - a.y)
    t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / d2
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))


def proper_intersection(a: Point2, b: Point2, c: Point2, d: Point2) -> Point2 | None:
    """Intersection point of segments ab and cd when they cross transversally.

    Endpoint touches and collinear overlaps do not count.
    """
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        t = d1 / (d1 - d2)
        return Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    return None


def segments_touch(a: Point2, b: Point2, c: Point2, d: Point2) -> bool:
    """True when segments ab and cd share any point (within TOUCH_EPS)."""
    if proper_intersection(a, b, c, d) is not None:
        return True
    return (
        _seg_point_distance(c, a, b) < TOUCH_EPS
        or _seg_point_distance(d, a, b) < TOUCH_EPS
        or _seg_point_distance(a, c, d) < TOUCH_EPS
        or _seg_point_distance(b, c, d) < TOUCH_EPS
    )


def point_in_polygon(p: Point2, vertices: Sequence[Point2]) -> bool:
    """Even-odd containment test; boundary points are unreliable here."""
    inside = False
    n = len(vertices)
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        if (a.y <= p.y) != (b.y <= p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def point_strictly_inside(p: Point2, vertices: Sequence[Point2]) -> bool:
    n = len(vertices)
    for i in range(n):
        if _seg_point_distance(p, vertices[i], vertices[(i + 1) % n]) < TOUCH_EPS:
            return False
    return point_in_polygon(p, vertices)


class Loop:
    """Ordered closed vertex ring.

    Enforces the cheap invariants on construction (at least three vertices,
    no two consecutive vertices identical). Self-intersection is checked
    separately via validate_simple() because it is O(n^2).
    """

    __slots__ = ("vertices", "_area")

    def __init__(self, vertices: Iterable[Point2]):
        vs = list(vertices)
        if len(vs) < 3:
            raise DegenerateInput(f"loop needs at least 3 vertices, got {len(vs)}")
        n = len(vs)
        for i in range(n):
            a = vs[i]
            b = vs[(i + 1) % n]
            if a.x == b.x and a.y == b.y:
                raise DegenerateInput(f"consecutive identical vertices at index {i}")
        self.vertices: list[Point2] = vs
        self._area: float | None = None

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Loop) and self.vertices == other.vertices

    def __repr__(self) -> str:
        return f"Loop({len(self.vertices)} vertices)"

    @property
    def signed_area(self) -> float:
        if self._area is None:
            self._area = signed_area(self.vertices)
        return self._area

    @property
    def winding(self) -> Winding:
        return Winding.CLOCKWISE if self.signed_area < 0 else Winding.COUNTERCLOCKWISE

    def reversed(self) -> "Loop":
        return Loop(list(reversed(self.vertices)))

    def edges(self) -> Iterator[tuple[Point2, Point2]]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    def centroid(self) -> Point2:
        try:
            return polygon_centroid(self.vertices)
        except DegenerateInput:
            return vertex_mean(self.vertices)

    def validate_simple(self) -> None:
        """Raise NonSimpleLoop when any two edges intersect improperly.

        Adjacent edges may only share their common endpoint; all other edge
        pairs must be disjoint.
        """
        vs = self.vertices
        n = len(vs)
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            for j in range(i + 1, n):
                c, d = vs[j], vs[(j + 1) % n]
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    # Shared endpoint is fine; anything more means a fold-back.
                    other_far = d if j == i + 1 else c
                    if _seg_point_distance(other_far, a, b) < TOUCH_EPS:
                        raise NonSimpleLoop(f"edges {i} and {j} overlap")
                    far_own = a if j == i + 1 else b
                    if _seg_point_distance(far_own, c, d) < TOUCH_EPS:
                        raise NonSimpleLoop(f"edges {i} and {j} overlap")
                elif segments_touch(a, b, c, d):
                    raise NonSimpleLoop(f"edges {i} and {j} intersect")


@dataclass(slots=True)
class Hole:
    """A hole loop, optionally carrying nested sub-holes."""

    loop: Loop
    sub_holes: list["Hole"] = field(default_factory=list)


@dataclass(slots=True)
class Contour:
    """An authored planar region on one slice: outer boundary plus holes."""

    slice_index: int
    structure_label: str
    author_id: str
    outer: Loop
    holes: list[Hole] = field(default_factory=list)

    def all_loops(self) -> Iterator[tuple[Loop, int]]:
        """Yield (loop, nesting_depth) depth-first, outer first."""
        yield self.outer, 0

        def walk(holes: list[Hole], depth: int) -> Iterator[tuple[Loop, int]]:
            for h in holes:
                yield h.loop, depth
                yield from walk(h.sub_holes, depth + 1)

        yield from walk(self.holes, 1)


def _loop_strictly_inside(inner: Loop, outer: Loop) -> bool:
    for p in inner.vertices:
        if not point_strictly_inside(p, outer.vertices):
            return False
    for a, b in inner.edges():
        for c, d in outer.edges():
            if segments_touch(a, b, c, d):
                return False
    return True


def _loops_disjoint(a: Loop, b: Loop) -> bool:
    for pa, pb in a.edges():
        for pc, pd in b.edges():
            if segments_touch(pa, pb, pc, pd):
                return False
    if point_in_polygon(a.vertices[0], b.vertices):
        return False
    if point_in_polygon(b.vertices[0], a.vertices):
        return False
    return True


def validate_contour(c: Contour) -> None:
    """Check the full contour invariants; raises on the first violation.

    Raises NonSimpleLoop for self-intersecting loops and DegenerateInput for
    containment or nesting violations.
    """
    if c.slice_index < 0:
        raise DegenerateInput(f"negative slice_index {c.slice_index}")
    for loop, _depth in c.all_loops():
        loop.validate_simple()

    def check_level(parent: Loop, holes: list[Hole]) -> None:
        for h in holes:
            if not _loop_strictly_inside(h.loop, parent):
                raise DegenerateInput("hole not strictly inside its parent loop")
        for i in range(len(holes)):
            for j in range(i + 1, len(holes)):
                if not _loops_disjoint(holes[i].loop, holes[j].loop):
                    raise DegenerateInput("sibling hole loops are not disjoint")
        for h in holes:
            check_level(h.loop, h.sub_holes)

    check_level(c.outer, c.holes)
