"""Contour rasterization and accuracy scoring against expert contours.

Contours are filled on the dataset's pixel grid with the even-odd rule,
sampling at pixel centers. Holes simply contribute more edges: a pixel
inside the outer loop and inside a hole has even crossing parity and stays
unfilled, matching how the contours nest.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from slicelab.geometry import Contour, contour_from_json

from .errors import NoAtlasEntry


def rasterize_contour(c: Contour, width: int, height: int, pixel_spacing: float) -> np.ndarray:
    """Boolean mask of the contour's filled region (holes excluded).

    Pixel (row, col) samples the point ((col+0.5)*s, (row+0.5)*s) in mm.
    """
    if width < 1 or height < 1 or pixel_spacing <= 0:
        raise ValueError("bad raster geometry")
    xs0, ys0, xs1, ys1 = [], [], [], []
    for loop, _depth in c.all_loops():
        vs = loop.vertices
        n = len(vs)
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            xs0.append(a.x)
            ys0.append(a.y)
            xs1.append(b.x)
            ys1.append(b.y)
    x0 = np.asarray(xs0)
    y0 = np.asarray(ys0)
    x1 = np.asarray(xs1)
    y1 = np.asarray(ys1)

    mask = np.zeros((height, width), dtype=bool)
    col_centers = (np.arange(width) + 0.5) * pixel_spacing
    for row in range(height):
        py = (row + 0.5) * pixel_spacing
        # Half-open rule: an edge spans the scanline iff exactly one
        # endpoint is at or below it.
        spans = (y0 <= py) != (y1 <= py)
        if not spans.any():
            continue
        xa, xb = x0[spans], x1[spans]
        ya, yb = y0[spans], y1[spans]
        crossings = xa + (py - ya) * (xb - xa) / (yb - ya)
        crossings.sort()
        # Parity of crossings left of each pixel center.
        idx = np.searchsorted(crossings, col_centers, side="left")
        mask[row] = (idx % 2) == 1
    return mask


def dice_score(mask_a: np.ndarray, mask_b: np.ndarray) -> float:
    """Dice overlap 2|A∩B| / (|A|+|B|); two empty masks count as identical."""
    if mask_a.shape != mask_b.shape:
        raise ValueError("masks must share a shape")
    a = int(mask_a.sum())
    b = int(mask_b.sum())
    if a + b == 0:
        return 1.0
    inter = int(np.logical_and(mask_a, mask_b).sum())
    return 2.0 * inter / (a + b)


def contour_accuracy(
    drawn: Contour, expert: Contour, width: int, height: int, pixel_spacing: float
) -> float:
    ma = rasterize_contour(drawn, width, height, pixel_spacing)
    mb = rasterize_contour(expert, width, height, pixel_spacing)
    return dice_score(ma, mb)


class Atlas:
    """Expert contours keyed by (slice_index, structure_label)."""

    def __init__(self, atlas_id: str, contours: list[Contour]):
        self.atlas_id = atlas_id
        self._entries: dict[tuple[int, str], Contour] = {}
        for c in contours:
            self._entries[(c.slice_index, c.structure_label)] = c

    def lookup(self, slice_index: int, structure_label: str) -> Contour:
        try:
            return self._entries[(slice_index, structure_label)]
        except KeyError:
            raise NoAtlasEntry(
                f"atlas {self.atlas_id!r} has no contour for slice {slice_index}, "
                f"structure {structure_label!r}"
            ) from None

    def has(self, slice_index: int, structure_label: str) -> bool:
        return (slice_index, structure_label) in self._entries

    @classmethod
    def load(cls, path: str | Path) -> "Atlas":
        doc = json.loads(Path(path).read_text())
        return cls(
            atlas_id=doc["atlas_id"],
            contours=[contour_from_json(c) for c in doc["contours"]],
        )
