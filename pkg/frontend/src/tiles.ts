// Tile selection for the slice viewer.
//
// The store keeps each slice at successively halved zoom levels: zoom z is
// downscaled by 2^z and cut into tile_size squares. For a viewport at scale
// s (screen px per dataset px) the coarsest level that still meets screen
// resolution is the largest z with 2^z <= 1/s; anything coarser would blur,
// anything finer wastes bytes.

import type { Viewport, WorldRect } from "./viewport.js";
import { worldRect, clampRect } from "./viewport.js";

export interface DatasetManifest {
  dataset_id: string;
  slice_count: number;
  slice_width_px: number;
  slice_height_px: number;
  pixel_spacing: number;
  slice_spacing: number;
  tile_size: number;
  zoom_levels: number;
  slice_checksums?: string[];
}

export interface TileAddress {
  sliceIndex: number;
  zoom: number;
  x: number;
  y: number;
}

export function chooseZoom(scale: number, zoomLevels: number): number {
  if (!(scale > 0)) throw new RangeError("scale must be > 0");
  let z = Math.floor(Math.log2(1 / scale));
  // guard the float log against landing one step high
  while (z > 0 && 2 ** z > 1 / scale) z -= 1;
  if (z < 0) z = 0;
  if (z > zoomLevels - 1) z = zoomLevels - 1;
  return z;
}

export function gridSize(m: DatasetManifest, zoom: number): { cols: number; rows: number } {
  const f = 2 ** zoom;
  const levelW = Math.ceil(m.slice_width_px / f);
  const levelH = Math.ceil(m.slice_height_px / f);
  return { cols: Math.ceil(levelW / m.tile_size), rows: Math.ceil(levelH / m.tile_size) };
}

/**
 * Tiles intersecting the viewport at the chosen zoom. The visible rect is
 * treated as closed, so an edge landing exactly on a tile boundary pulls in
 * the tile on its far side; a viewport entirely off the slice yields [].
 */
export function visibleTiles(v: Viewport, m: DatasetManifest): TileAddress[] {
  const rect = clampRect(worldRect(v), m.slice_width_px, m.slice_height_px);
  if (rect === null) return [];
  const zoom = chooseZoom(v.scale, m.zoom_levels);
  return tilesInRect(rect, m, v.sliceIndex, zoom);
}

export function tilesInRect(
  rect: WorldRect,
  m: DatasetManifest,
  sliceIndex: number,
  zoom: number,
): TileAddress[] {
  const span = m.tile_size * 2 ** zoom; // dataset px per tile edge
  const { cols, rows } = gridSize(m, zoom);
  const txMin = Math.max(0, Math.floor(rect.x0 / span));
  const txMax = Math.min(cols - 1, Math.floor(rect.x1 / span));
  const tyMin = Math.max(0, Math.floor(rect.y0 / span));
  const tyMax = Math.min(rows - 1, Math.floor(rect.y1 / span));
  const out: TileAddress[] = [];
  for (let ty = tyMin; ty <= tyMax; ty++) {
    for (let tx = txMin; tx <= txMax; tx++) {
      out.push({ sliceIndex, zoom, x: tx, y: ty });
    }
  }
  return out;
}

export function tilePath(datasetId: string, t: TileAddress): string {
  return `/datasets/${datasetId}/slices/${t.sliceIndex}/${t.zoom}/${t.x}_${t.y}.png`;
}

export function manifestPath(datasetId: string): string {
  return `/datasets/${datasetId}/manifest.json`;
}
