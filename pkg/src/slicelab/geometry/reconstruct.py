"""Contour stacks to closed volumes.

The pipeline sorts contours by slice, normalizes each one, pairs loops
between consecutive slices by centroid proximity, builds a band per pair,
caps loose ends, and welds everything into one mesh.

Branching (a loop with no partner on a neighboring slice away from the
stack ends) is not reconstructed topologically: the loose loop is capped
and a warning is emitted. A contour end that still carries holes cannot be
capped by ear clipping, so it is left open, which the returned stats
report as non-watertight.
"""
from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .errors import InsufficientContours, MixedStructureLabels
from .mesh import MeshStats, TriangleMesh, merge_meshes, mesh_stats
from .normalize import NormalizedContour, normalize_contour
from .primitives import Contour
from .shell import Facing, build_shell, cap_loop, match_loops


class ReconstructionWarning(UserWarning):
    """Base class for non-fatal reconstruction events."""


class UnmatchedLoopCapped(ReconstructionWarning):
    """A mid-stack loop had no partner on the next slice and was capped."""


class OpenContourEnd(ReconstructionWarning):
    """A contour end with holes was left open (no keyhole bridging)."""


@dataclass(slots=True)
class _Node:
    contour: NormalizedContour
    loop_index: int
    z: float
    matched_up: bool = False
    matched_down: bool = False


def _cap_facing(depth: int, side: str) -> Facing:
    # Solid boundaries (even depth) cap away from the stack; hole tubes cap
    # into the vanished void, which flips the direction.
    if side == "top":
        return "up" if depth % 2 == 0 else "down"
    return "down" if depth % 2 == 0 else "up"


def reconstruct_volume(
    contours: Sequence[Contour], slice_spacing: float
) -> tuple[TriangleMesh, MeshStats]:
    """Reconstruct one structure's volume from its contour stack.

    Returns the welded mesh and its topology statistics. Raises
    InsufficientContours when fewer than two contours (or fewer than two
    distinct slices) are given and MixedStructureLabels when the contours
    disagree on structure_label.
    """
    if len(contours) < 2:
        raise InsufficientContours(f"need at least 2 contours, got {len(contours)}")
    labels = {c.structure_label for c in contours}
    if len(labels) > 1:
        raise MixedStructureLabels(f"got labels {sorted(labels)}")
    if slice_spacing <= 0:
        raise ValueError("slice_spacing must be positive")

    by_slice: dict[int, list[NormalizedContour]] = defaultdict(list)
    for c in sorted(contours, key=lambda c: c.slice_index):
        by_slice[c.slice_index].append(normalize_contour(c))
    slice_order = sorted(by_slice)
    if len(slice_order) < 2:
        raise InsufficientContours("contours span fewer than 2 distinct slices")

    groups = [by_slice[s] for s in slice_order]
    zs = [s * slice_spacing for s in slice_order]

    # nodes[(group_idx, contour_idx, loop_idx)] tracks pairing per loop.
    nodes: dict[tuple[int, int, int], _Node] = {}
    for gi, group in enumerate(groups):
        for ci, nc in enumerate(group):
            for li in range(len(nc.loops)):
                nodes[(gi, ci, li)] = _Node(contour=nc, loop_index=li, z=zs[gi])

    shells: list[TriangleMesh] = []

    def pair_recursive(gi: int, ci_a: int, la: int, ci_b: int, lb: int) -> None:
        nc_a = groups[gi][ci_a]
        nc_b = groups[gi + 1][ci_b]
        shells.append(
            build_shell(nc_a.loops[la], zs[gi], nc_b.loops[lb], zs[gi + 1])
        )
        nodes[(gi, ci_a, la)].matched_up = True
        nodes[(gi + 1, ci_b, lb)].matched_down = True
        kids_a = nc_a.children_of(la)
        kids_b = nc_b.children_of(lb)
        m = match_loops(
            [nc_a.loops[k] for k in kids_a], [nc_b.loops[k] for k in kids_b]
        )
        for i, j in m.pairs:
            pair_recursive(gi, ci_a, kids_a[i], ci_b, kids_b[j])

    for gi in range(len(groups) - 1):
        outers_a = [nc.outer for nc in groups[gi]]
        outers_b = [nc.outer for nc in groups[gi + 1]]
        m = match_loops(outers_a, outers_b)
        for i, j in m.pairs:
            pair_recursive(gi, i, 0, j, 0)

    caps: list[TriangleMesh] = []
    last = len(groups) - 1

    def handle_end(gi: int, ci: int, li: int, side: str) -> None:
        nc = groups[gi][ci]
        node = nodes[(gi, ci, li)]
        loop = nc.loops[li]
        parent = loop.parent_index
        if parent is not None:
            pnode = nodes[(gi, ci, parent)]
            parent_open = not (pnode.matched_up if side == "top" else pnode.matched_down)
            if parent_open:
                return  # covered by the ancestor's outcome
        interior = (gi < last) if side == "top" else (gi > 0)
        if nc.children_of(li):
            warnings.warn(
                f"contour end with holes left open at slice {slice_order[gi]} "
                f"(structure {nc.source.structure_label!r})",
                OpenContourEnd,
                stacklevel=3,
            )
            return
        caps.append(cap_loop(loop, node.z, _cap_facing(loop.depth, side)))
        if interior:
            warnings.warn(
                f"unmatched loop at slice {slice_order[gi]} capped "
                f"(structure {nc.source.structure_label!r})",
                UnmatchedLoopCapped,
                stacklevel=3,
            )

    for gi in range(len(groups)):
        for ci in range(len(groups[gi])):
            for li in range(len(groups[gi][ci].loops)):
                node = nodes[(gi, ci, li)]
                if not node.matched_down:
                    handle_end(gi, ci, li, "bottom")
                if not node.matched_up:
                    handle_end(gi, ci, li, "top")

    mesh = merge_meshes(shells + caps)
    return mesh, mesh_stats(mesh)
