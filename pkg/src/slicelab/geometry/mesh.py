"""Triangle meshes, topology statistics, and welding.

Vertices are (x, y, z) millimeter triples; triangles index into the vertex
list. Meshes produced by the shell builder share contour vertices exactly,
so welding is a quantized-position merge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# Triangles below this area (mm^2) are dropped during band emission.
DEGENERATE_AREA = 1e-12
# Vertices closer than this (mm) weld to one mesh vertex.
WELD_TOLERANCE = 1e-6

Vec3 = tuple[float, float, float]
Tri = tuple[int, int, int]


@dataclass(slots=True)
class TriangleMesh:
    vertices: list[Vec3] = field(default_factory=list)
    triangles: list[Tri] = field(default_factory=list)

    def validate_indices(self) -> None:
        n = len(self.vertices)
        for t in self.triangles:
            for i in t:
                if not 0 <= i < n:
                    raise IndexError(f"triangle index {i} out of range [0, {n})")


@dataclass(slots=True)
class MeshStats:
    vertex_count: int
    edge_count: int
    triangle_count: int
    euler_characteristic: int
    watertight: bool
    signed_volume: float
    boundary_loop_count: int

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "triangle_count": self.triangle_count,
            "euler_characteristic": self.euler_characteristic,
            "watertight": self.watertight,
            "signed_volume": self.signed_volume,
            "boundary_loop_count": self.boundary_loop_count,
        }


def triangle_area(a: Vec3, b: Vec3, c: Vec3) -> float:
    ux, uy, uz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    vx, vy, vz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    return 0.5 * math.sqrt(cx * cx + cy * cy + cz * cz)


def _edge_incidence(m: TriangleMesh) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for a, b, c in m.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            counts[key] = counts.get(key, 0) + 1
    return counts


def _boundary_loop_count(boundary_edges: Iterable[tuple[int, int]]) -> int:
    # Count connected components of the boundary edge graph.
    adj: dict[int, list[int]] = {}
    for u, v in boundary_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen: set[int] = set()
    loops = 0
    for start in adj:
        if start in seen:
            continue
        loops += 1
        stack = [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return loops


def signed_volume(m: TriangleMesh) -> float:
    """Divergence theorem volume; positive for outward-oriented surfaces."""
    terms = []
    vs = m.vertices
    for ia, ib, ic in m.triangles:
        ax, ay, az = vs[ia]
        bx, by, bz = vs[ib]
        cx, cy, cz = vs[ic]
        terms.append(
            ax * (by * cz - bz * cy)
            + ay * (bz * cx - bx * cz)
            + az * (bx * cy - by * cx)
        )
    return math.fsum(terms) / 6.0


def mesh_stats(m: TriangleMesh) -> MeshStats:
    m.validate_indices()
    incidence = _edge_incidence(m)
    boundary = [e for e, n in incidence.items() if n == 1]
    watertight = len(m.triangles) > 0 and all(n == 2 for n in incidence.values())
    return MeshStats(
        vertex_count=len(m.vertices),
        edge_count=len(incidence),
        triangle_count=len(m.triangles),
        euler_characteristic=len(m.vertices) - len(incidence) + len(m.triangles),
        watertight=watertight,
        signed_volume=signed_volume(m),
        boundary_loop_count=_boundary_loop_count(boundary),
    )


def _quantize(v: Vec3, tol: float) -> tuple[float, float, float]:
    # round() maps -0.0 and 0.0 to keys that hash alike, so this is stable.
    digits = max(0, round(-math.log10(tol)))
    return (round(v[0], digits), round(v[1], digits), round(v[2], digits))


def merge_meshes(meshes: Sequence[TriangleMesh], weld_tol: float = WELD_TOLERANCE) -> TriangleMesh:
    """Concatenate meshes, welding vertices that agree within weld_tol.

    The first occurrence of a position wins; triangle order follows the
    input order, so the result is deterministic.
    """
    out = TriangleMesh()
    index_of: dict[tuple[float, float, float], int] = {}
    for m in meshes:
        remap: list[int] = []
        for v in m.vertices:
            key = _quantize(v, weld_tol)
            idx = index_of.get(key)
            if idx is None:
                idx = len(out.vertices)
                out.vertices.append(v)
                index_of[key] = idx
            remap.append(idx)
        for a, b, c in m.triangles:
            out.triangles.append((remap[a], remap[b], remap[c]))
    return out


def connected_components(m: TriangleMesh) -> list[TriangleMesh]:
    """Split into vertex-connected components, preserving local order.

    Unreferenced vertices are dropped. Components are ordered by their
    smallest original vertex index.
    """
    parent = list(range(len(m.vertices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a, b, c in m.triangles:
        union(a, b)
        union(b, c)

    roots: list[int] = []
    comp_for_root: dict[int, int] = {}
    for a, _b, _c in m.triangles:
        r = find(a)
        if r not in comp_for_root:
            comp_for_root[r] = len(roots)
            roots.append(r)

    parts = [TriangleMesh() for _ in roots]
    remaps: list[dict[int, int]] = [{} for _ in roots]
    for tri in m.triangles:
        ci = comp_for_root[find(tri[0])]
        part, remap = parts[ci], remaps[ci]
        new_tri = []
        for i in tri:
            if i not in remap:
                remap[i] = len(part.vertices)
                part.vertices.append(m.vertices[i])
            new_tri.append(remap[i])
        part.triangles.append((new_tri[0], new_tri[1], new_tri[2]))
    return parts
