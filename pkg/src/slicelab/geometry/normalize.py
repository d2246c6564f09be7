"""Angular normalization of contours.

Every loop of a contour gets a monotone angle parameterization: angles are
measured from the +X axis around the loop's convex hull centroid, in degrees
within [0, 360), following the loop's own winding direction. Loop winding
alternates with nesting depth (outer and even depths clockwise, odd depths
counterclockwise), so even-depth loops carry clockwise-measured angles and
odd-depth loops counterclockwise-measured ones; either way the list ascends
along the traversal and the band builder can walk two same-depth loops in
the same rotational direction.

The loop keeps its own cyclic vertex order. For loops that are not
star-shaped about the hull center the raw angle sequence can dip; those
entries are lifted to the previous angle plus a tiny nudge so the list is
strictly increasing without reordering vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import DegenerateInput
from .hull import convex_hull, hull_center
from .primitives import Contour, Hole, Loop, Point2, Winding

# Degrees added to force strict monotonicity on duplicate or dipping angles.
ANGLE_NUDGE_DEG = 1e-9


def clockwise_angle_deg(p: Point2, center: Point2) -> float:
    """Angle of p about center, measured clockwise from +X, in [0, 360)."""
    a = -math.degrees(math.atan2(p.y - center.y, p.x - center.x)) % 360.0
    # float modulo can round a tiny negative input up to the modulus itself
    return 0.0 if a >= 360.0 else a


def counterclockwise_angle_deg(p: Point2, center: Point2) -> float:
    """Angle of p about center, measured counterclockwise from +X, in [0, 360)."""
    a = math.degrees(math.atan2(p.y - center.y, p.x - center.x)) % 360.0
    return 0.0 if a >= 360.0 else a


@dataclass(slots=True)
class NormalizedLoop:
    """A loop with a strictly increasing angle list.

    vertices[i] sits at angles[i] degrees from +X about center, measured in
    the loop's winding direction (clockwise at even depth, counterclockwise
    at odd). depth is the nesting level: 0 outer, 1 hole, 2 sub-hole, and so
    on. parent_index points into NormalizedContour.loops, None for the outer.
    """

    vertices: list[Point2]
    angles: list[float]
    center: Point2
    depth: int
    parent_index: int | None = None

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(slots=True)
class NormalizedContour:
    source: Contour
    loops: list[NormalizedLoop] = field(default_factory=list)

    @property
    def outer(self) -> NormalizedLoop:
        return self.loops[0]

    def children_of(self, index: int) -> list[int]:
        return [i for i, lp in enumerate(self.loops) if lp.parent_index == index]

    def iter_depth_first(self) -> Iterator[tuple[int, NormalizedLoop]]:
        yield from enumerate(self.loops)


def normalize_loop(loop: Loop, depth: int) -> NormalizedLoop:
    """Normalize one loop at the given nesting depth.

    Pipeline: convex hull, hull area centroid, winding fix (even depth
    clockwise, odd counterclockwise), per-vertex angles measured in the
    loop's winding direction so they ascend along the traversal, rotation to
    the minimum-angle vertex (ties broken by radial distance, nearer first),
    then monotonicity enforcement along the final order.
    """
    loop.validate_simple()
    hull = convex_hull(loop.vertices)
    center = hull_center(hull)

    verts = list(loop.vertices)
    want_cw = depth % 2 == 0
    is_cw = loop.winding == Winding.CLOCKWISE
    if abs(loop.signed_area) < 1e-12:
        raise DegenerateInput("loop area below tolerance")
    if want_cw != is_cw:
        verts.reverse()

    measure = clockwise_angle_deg if want_cw else counterclockwise_angle_deg
    raw = [measure(p, center) for p in verts]

    def radial(i: int) -> float:
        return math.hypot(verts[i].x - center.x, verts[i].y - center.y)

    start = min(range(len(verts)), key=lambda i: (raw[i], radial(i), i))
    verts = verts[start:] + verts[:start]
    raw = raw[start:] + raw[:start]

    angles = [raw[0]]
    for a in raw[1:]:
        angles.append(max(a, angles[-1] + ANGLE_NUDGE_DEG))

    return NormalizedLoop(vertices=verts, angles=angles, center=center, depth=depth)


def normalize_contour(c: Contour) -> NormalizedContour:
    """Normalize a contour's outer loop and every hole and sub-hole.

    Loops are emitted depth-first with parent links so callers can pair
    holes within matched parents.
    """
    nc = NormalizedContour(source=c)
    nc.loops.append(normalize_loop(c.outer, depth=0))

    def walk(holes: list[Hole], depth: int, parent_index: int) -> None:
        for h in holes:
            nl = normalize_loop(h.loop, depth=depth)
            nl.parent_index = parent_index
            nc.loops.append(nl)
            walk(h.sub_holes, depth + 1, len(nc.loops) - 1)

    walk(c.holes, 1, 0)
    return nc
