"""Contour wire format.

One contour serializes as:

    {"slice": int, "structure": str, "author": str,
     "outer": [[x, y], ...],
     "holes": [{"loop": [[x, y], ...], "sub_holes": [...]}]}

Coordinates are millimeters, written with at most six decimals.
"""
from __future__ import annotations

from typing import Any

from .errors import DegenerateInput
from .primitives import Contour, Hole, Loop, Point2, validate_contour


def _round6(v: float) -> float:
    return round(float(v), 6)


def _loop_to_json(loop: Loop) -> list[list[float]]:
    return [[_round6(p.x), _round6(p.y)] for p in loop.vertices]


def _hole_to_json(h: Hole) -> dict[str, Any]:
    return {
        "loop": _loop_to_json(h.loop),
        "sub_holes": [_hole_to_json(s) for s in h.sub_holes],
    }


def contour_to_json(c: Contour) -> dict[str, Any]:
    return {
        "slice": c.slice_index,
        "structure": c.structure_label,
        "author": c.author_id,
        "outer": _loop_to_json(c.outer),
        "holes": [_hole_to_json(h) for h in c.holes],
    }


def _loop_from_json(data: Any, what: str) -> Loop:
    if not isinstance(data, list):
        raise DegenerateInput(f"{what} must be a list of [x, y] pairs")
    pts = []
    for entry in data:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise DegenerateInput(f"{what} entries must be [x, y] pairs")
        x, y = entry
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise DegenerateInput(f"{what} coordinates must be numbers")
        pts.append(Point2(float(x), float(y)))
    return Loop(pts)


def _hole_from_json(data: Any) -> Hole:
    if not isinstance(data, dict) or "loop" not in data:
        raise DegenerateInput("hole entries must be objects with a 'loop' key")
    subs = data.get("sub_holes", [])
    if not isinstance(subs, list):
        raise DegenerateInput("'sub_holes' must be a list")
    return Hole(
        loop=_loop_from_json(data["loop"], "hole loop"),
        sub_holes=[_hole_from_json(s) for s in subs],
    )


def contour_from_json(data: Any, validate: bool = True) -> Contour:
    """Parse and (by default) fully validate a contour document."""
    if not isinstance(data, dict):
        raise DegenerateInput("contour document must be an object")
    for key in ("slice", "structure", "author", "outer"):
        if key not in data:
            raise DegenerateInput(f"contour document missing '{key}'")
    slice_index = data["slice"]
    if not isinstance(slice_index, int) or isinstance(slice_index, bool) or slice_index < 0:
        raise DegenerateInput("'slice' must be a non-negative integer")
    if not isinstance(data["structure"], str) or not data["structure"]:
        raise DegenerateInput("'structure' must be a non-empty string")
    if not isinstance(data["author"], str) or not data["author"]:
        raise DegenerateInput("'author' must be a non-empty string")
    holes = data.get("holes", [])
    if not isinstance(holes, list):
        raise DegenerateInput("'holes' must be a list")
    c = Contour(
        slice_index=slice_index,
        structure_label=data["structure"],
        author_id=data["author"],
        outer=_loop_from_json(data["outer"], "outer loop"),
        holes=[_hole_from_json(h) for h in holes],
    )
    if validate:
        validate_contour(c)
    return c
