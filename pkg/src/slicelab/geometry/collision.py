"""Collision detection between contours sharing a slice."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .primitives import Contour, Point2, proper_intersection


@dataclass(frozen=True, slots=True)
class CollisionHit:
    """One transversal crossing between the candidate and existing[index]."""

    point: Point2
    index: int


def detect_collisions(candidate: Contour, existing: Sequence[Contour]) -> list[CollisionHit]:
    """All transversal segment crossings against same-slice contours.

    Contours on other slices are ignored. Every loop of each contour
    (outer, holes, sub-holes) participates. Touching endpoints and
    collinear overlaps are not reported.
    """
    hits: list[CollisionHit] = []
    cand_edges = [edge for loop, _d in candidate.all_loops() for edge in loop.edges()]
    for idx, other in enumerate(existing):
        if other.slice_index != candidate.slice_index:
            continue
        for loop, _depth in other.all_loops():
            for c, d in loop.edges():
                for a, b in cand_edges:
                    p = proper_intersection(a, b, c, d)
                    if p is not None:
                        hits.append(CollisionHit(point=p, index=idx))
    return hits
