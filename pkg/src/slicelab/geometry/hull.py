"""Convex hull and hull centering for contour normalization."""
from __future__ import annotations

import warnings
from typing import Sequence

from .errors import DegenerateInput
from .primitives import AREA_EPS, Loop, Point2, cross, polygon_centroid, vertex_mean


def convex_hull(points: Sequence[Point2]) -> Loop:
    """Convex hull of a point set as a counterclockwise loop.

    Andrew's monotone chain; collinear points on hull edges are dropped so
    the result has strict turns at every vertex.
    """
    unique = sorted({(p.x, p.y) for p in points})
    if len(unique) < 3:
        raise DegenerateInput(f"need at least 3 distinct points, got {len(unique)}")
    pts = [Point2(x, y) for x, y in unique]

    def half(seq):
        chain: list[Point2] = []
        for p in seq:
            while len(chain) > 1 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        raise DegenerateInput("all points are collinear")
    return Loop(ring)


def hull_center(hull: Loop, fallback: bool = False) -> Point2:
    """Area centroid of a hull polygon.

    With fallback=True a degenerate (near zero area) hull yields the
    arithmetic mean of its vertices instead of raising, with a warning.
    """
    if abs(hull.signed_area) < AREA_EPS:
        if fallback:
            warnings.warn("degenerate hull, falling back to vertex mean", stacklevel=2)
            return vertex_mean(hull.vertices)
        raise DegenerateInput("hull area below tolerance")
    return polygon_centroid(hull.vertices)
