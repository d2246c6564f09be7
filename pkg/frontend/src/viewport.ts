// Viewport math: mapping between screen pixels and dataset pixels.
//
// A viewport is defined by the dataset point under the canvas center and a
// scale in screen px per dataset px. All conversions are pure.

export interface Viewport {
  sliceIndex: number;
  centerX: number; // dataset px
  centerY: number; // dataset px
  scale: number; // screen px per dataset px, > 0
  canvasW: number; // screen px
  canvasH: number; // screen px
}

export interface WorldRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export function validateViewport(v: Viewport, sliceCount: number): void {
  if (!(v.scale > 0)) throw new RangeError("scale must be > 0");
  if (!Number.isInteger(v.sliceIndex) || v.sliceIndex < 0 || v.sliceIndex >= sliceCount) {
    throw new RangeError(`slice ${v.sliceIndex} outside [0, ${sliceCount})`);
  }
}

export function screenToDataset(v: Viewport, sx: number, sy: number): { x: number; y: number } {
  return {
    x: v.centerX + (sx - v.canvasW / 2) / v.scale,
    y: v.centerY + (sy - v.canvasH / 2) / v.scale,
  };
}

export function datasetToScreen(v: Viewport, x: number, y: number): { x: number; y: number } {
  return {
    x: (x - v.centerX) * v.scale + v.canvasW / 2,
    y: (y - v.centerY) * v.scale + v.canvasH / 2,
  };
}

/** Dataset-px rectangle covered by the canvas, closed on all edges. */
export function worldRect(v: Viewport): WorldRect {
  const hw = v.canvasW / (2 * v.scale);
  const hh = v.canvasH / (2 * v.scale);
  return { x0: v.centerX - hw, y0: v.centerY - hh, x1: v.centerX + hw, y1: v.centerY + hh };
}

/** Intersect with the slice bounds; null when nothing of the slice shows. */
export function clampRect(r: WorldRect, widthPx: number, heightPx: number): WorldRect | null {
  const x0 = Math.max(r.x0, 0);
  const y0 = Math.max(r.y0, 0);
  const x1 = Math.min(r.x1, widthPx);
  const y1 = Math.min(r.y1, heightPx);
  if (x0 > x1 || y0 > y1) return null;
  return { x0, y0, x1, y1 };
}

export function panBy(v: Viewport, dxScreen: number, dyScreen: number): Viewport {
  return { ...v, centerX: v.centerX - dxScreen / v.scale, centerY: v.centerY - dyScreen / v.scale };
}

/** Zoom by `factor` keeping the dataset point under screen (sx, sy) fixed. */
export function zoomAt(v: Viewport, factor: number, sx: number, sy: number): Viewport {
  const anchor = screenToDataset(v, sx, sy);
  const scale = Math.min(Math.max(v.scale * factor, 1 / 256), 64);
  const centerX = anchor.x - (sx - v.canvasW / 2) / scale;
  const centerY = anchor.y - (sy - v.canvasH / 2) / scale;
  return { ...v, scale, centerX, centerY };
}
