"""Participant color assignment.

24 hand-picked, high-contrast colors cover the default session capacity.
If a deployment raises the palette size past 24, additional colors are
generated deterministically on a golden-angle hue wheel so uniqueness
still holds.
"""
from __future__ import annotations

import colorsys

BASE_PALETTE: tuple[str, ...] = (
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
    "#9a6324", "#fffac8", "#800000", "#aaffc3", "#808000", "#ffd8b1",
    "#000075", "#808080", "#ffffff", "#000000", "#a9a9a9", "#2f4f4f",
)

GOLDEN_ANGLE = 0.6180339887498949


def color_for(index: int) -> str:
    """Hex color for a palette slot; stable for all non-negative indices."""
    if index < 0:
        raise ValueError("palette index must be non-negative")
    if index < len(BASE_PALETTE):
        return BASE_PALETTE[index]
    k = index - len(BASE_PALETTE)
    hue = (k * GOLDEN_ANGLE) % 1.0
    sat = 0.65 if k % 2 == 0 else 0.9
    val = 0.95 if k % 4 < 2 else 0.7
    r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"
