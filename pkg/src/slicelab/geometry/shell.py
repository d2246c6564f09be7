"""Bands between adjacent contours, end caps, and loop pairing.

A shell joins two normalized loops on different slice planes by walking
both angle lists in ascending order: starting from each loop's lowest-angle
vertex, the walk repeatedly consumes the globally next-lowest angle and
emits a triangle spanning the current vertices of both loops. The band
closes after exactly len(a) + len(b) steps.

Triangle orientation: edges of the upper loop are traversed in loop order,
edges of the lower loop against it. For clockwise outer loops this makes
the band normals face away from the enclosed solid, and for counter-
clockwise hole loops it flips them automatically, so stacked shells and
caps assemble into a consistently outward-oriented surface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .errors import CapUnsupported, EmptyLoop
from .mesh import DEGENERATE_AREA, TriangleMesh, triangle_area
from .normalize import NormalizedContour, NormalizedLoop
from .primitives import Point2, cross, polygon_centroid, vertex_mean

Facing = Literal["up", "down"]


def build_shell(a: NormalizedLoop, z_a: float, b: NormalizedLoop, z_b: float) -> TriangleMesh:
    """Triangle band between loop a at height z_a and loop b at height z_b.

    Requires z_a != z_b and equal depth parity (solid walls pair with solid
    walls, hole walls with hole walls). Degenerate triangles arising from
    duplicate angles are dropped.
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyLoop("cannot build a shell from an empty loop")
    if z_a == z_b:
        raise ValueError("shell loops must lie on different slice planes")
    if a.depth % 2 != b.depth % 2:
        raise ValueError("shell loops must have the same depth parity")

    if z_a < z_b:
        lower, z_low, upper, z_up = a, z_a, b, z_b
    else:
        lower, z_low, upper, z_up = b, z_b, a, z_a

    n_low, n_up = len(lower), len(upper)
    mesh = TriangleMesh()
    mesh.vertices = [(p.x, p.y, z_low) for p in lower.vertices] + [
        (p.x, p.y, z_up) for p in upper.vertices
    ]

    def next_angle(loop: NormalizedLoop, steps: int) -> float:
        n = len(loop)
        if steps < n - 1:
            return loop.angles[steps + 1]
        if steps == n - 1:
            return loop.angles[0] + 360.0
        return math.inf

    def emit(ia: int, ib: int, ic: int) -> None:
        tri = (ia, ib, ic)
        va, vb, vc = mesh.vertices[ia], mesh.vertices[ib], mesh.vertices[ic]
        if triangle_area(va, vb, vc) >= DEGENERATE_AREA:
            mesh.triangles.append(tri)

    i = j = 0  # advances made on lower / upper
    while i < n_low or j < n_up:
        adv_low = next_angle(lower, i)
        adv_up = next_angle(upper, j)
        cur_low = i % n_low
        cur_up = n_low + (j % n_up)
        if adv_low <= adv_up:
            nxt = (i + 1) % n_low
            emit(nxt, cur_low, cur_up)
            i += 1
        else:
            nxt = n_low + (j + 1) % n_up
            emit(cur_up, nxt, cur_low)
            j += 1
    return mesh


def _ear_clip(vertices: Sequence[Point2]) -> list[tuple[int, int, int]]:
    """Ear clipping for a simple polygon, returning index triples."""
    n = len(vertices)
    if n < 3:
        raise EmptyLoop("cannot triangulate fewer than 3 vertices")
    area2 = 0.0
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        area2 += a.x * b.y - b.x * a.y
    orient = 1.0 if area2 >= 0 else -1.0

    remaining = list(range(n))
    tris: list[tuple[int, int, int]] = []

    def is_ear(k: int, strict: bool) -> bool:
        p = vertices[remaining[k - 1]]
        v = vertices[remaining[k]]
        nx = vertices[remaining[(k + 1) % len(remaining)]]
        turn = cross(p, v, nx) * orient
        if strict and turn <= 1e-15:
            return False
        if not strict and turn < 0:
            return False
        for idx in remaining:
            if idx in (remaining[k - 1], remaining[k], remaining[(k + 1) % len(remaining)]):
                continue
            q = vertices[idx]
            d1 = cross(p, v, q) * orient
            d2 = cross(v, nx, q) * orient
            d3 = cross(nx, p, q) * orient
            if d1 > 0 and d2 > 0 and d3 > 0:
                return False
        return True

    while len(remaining) > 3:
        clipped = False
        for strict in (True, False):
            for k in range(len(remaining)):
                if is_ear(k, strict):
                    tris.append(
                        (
                            remaining[k - 1],
                            remaining[k],
                            remaining[(k + 1) % len(remaining)],
                        )
                    )
                    del remaining[k]
                    clipped = True
                    break
            if clipped:
                break
        if not clipped:
            # Numerically stuck polygon: clip an arbitrary vertex.
            tris.append((remaining[-1], remaining[0], remaining[1]))
            del remaining[0]
    tris.append((remaining[0], remaining[1], remaining[2]))
    return tris


def cap_loop(l: NormalizedLoop, z: float, facing: Facing) -> TriangleMesh:
    """Ear-clipping cap of a single loop at height z.

    Emits len(l) - 2 triangles oriented so normals point along +z when
    facing is "up" and along -z when facing is "down".
    """
    if len(l) == 0:
        raise EmptyLoop("cannot cap an empty loop")
    if facing not in ("up", "down"):
        raise ValueError(f"facing must be 'up' or 'down', got {facing!r}")
    mesh = TriangleMesh()
    mesh.vertices = [(p.x, p.y, z) for p in l.vertices]
    for a, b, c in _ear_clip(l.vertices):
        ccw = cross(l.vertices[a], l.vertices[b], l.vertices[c]) > 0
        if ccw != (facing == "up"):
            a, b, c = a, c, b
        mesh.triangles.append((a, b, c))
    return mesh


def cap_contour_end(nc: NormalizedContour, z: float, facing: Facing) -> TriangleMesh:
    """Cap a whole contour end; only hole-free contours are supported."""
    if len(nc.loops) > 1:
        raise CapUnsupported("contour end carries holes; leaving it open")
    return cap_loop(nc.outer, z, facing)


@dataclass(slots=True)
class MatchResult:
    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_a: list[int] = field(default_factory=list)
    unmatched_b: list[int] = field(default_factory=list)


def _loop_center(loop: NormalizedLoop) -> Point2:
    try:
        return polygon_centroid(loop.vertices)
    except Exception:
        return vertex_mean(loop.vertices)


def match_loops(
    loops_a: Sequence[NormalizedLoop], loops_b: Sequence[NormalizedLoop]
) -> MatchResult:
    """Greedy nearest-centroid pairing; each loop is matched at most once.

    Candidate pairs are ranked by centroid distance (ties by index) so the
    outcome is deterministic. Unmatched loops are reported for capping.
    """
    result = MatchResult()
    if not loops_a or not loops_b:
        result.unmatched_a = list(range(len(loops_a)))
        result.unmatched_b = list(range(len(loops_b)))
        return result

    ca = [_loop_center(l) for l in loops_a]
    cb = [_loop_center(l) for l in loops_b]
    candidates = sorted(
        (
            (math.hypot(ca[i].x - cb[j].x, ca[i].y - cb[j].y), i, j)
            for i in range(len(loops_a))
            for j in range(len(loops_b))
        ),
    )
    used_a: set[int] = set()
    used_b: set[int] = set()
    for _dist, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        result.pairs.append((i, j))
        used_a.add(i)
        used_b.add(j)
    result.pairs.sort()
    result.unmatched_a = [i for i in range(len(loops_a)) if i not in used_a]
    result.unmatched_b = [j for j in range(len(loops_b)) if j not in used_b]
    return result
