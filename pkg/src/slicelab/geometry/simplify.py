"""Polyline simplification for raw sketch strokes."""
from __future__ import annotations

from typing import Sequence

from .primitives import Point2, _seg_point_distance


def simplify_stroke(points: Sequence[Point2], epsilon: float) -> list[Point2]:
    """Ramer-Douglas-Peucker simplification.

    Endpoints are preserved and every discarded point lies within epsilon
    of the simplified polyline. epsilon = 0 returns the input with
    consecutive duplicates removed. Iterative to cope with long strokes.
    """
    if len(points) < 2:
        raise ValueError(f"need at least 2 points, got {len(points)}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")

    pts: list[Point2] = [points[0]]
    for p in points[1:]:
        if p.x != pts[-1].x or p.y != pts[-1].y:
            pts.append(p)
    if len(pts) < 3 or epsilon == 0:
        return pts

    keep = [False] * len(pts)
    keep[0] = keep[-1] = True
    stack = [(0, len(pts) - 1)]
    while stack:
        first, last = stack.pop()
        max_dist = epsilon
        index = -1
        a, b = pts[first], pts[last]
        for i in range(first + 1, last):
            d = _seg_point_distance(pts[i], a, b)
            if d > max_dist:
                max_dist = d
                index = i
        if index >= 0:
            keep[index] = True
            stack.append((first, index))
            stack.append((index, last))
    return [p for p, k in zip(pts, keep) if k]
