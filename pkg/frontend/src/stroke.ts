// Freehand stroke capture -> contour document.
//
// Screen points map through the viewport to dataset pixels and then to mm
// via pixel_spacing. The client only closes and de-duplicates the loop;
// simplification and validation happen on the server's commit path, which
// also returns the collision report used for highlighting.

import type { Viewport } from "./viewport.js";
import { screenToDataset } from "./viewport.js";
import type { DatasetManifest } from "./tiles.js";

export class TooFewPoints extends Error {}

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface HoleDoc {
  loop: [number, number][];
  sub_holes: HoleDoc[];
}

export interface ContourDoc {
  slice: number;
  structure: string;
  author: string;
  outer: [number, number][];
  holes: HoleDoc[];
}

export interface StrokeMeta {
  sliceIndex: number;
  structureLabel: string;
  authorId: string;
}

const MERGE_EPS_MM = 1e-9;

function samePoint(a: [number, number], b: [number, number]): boolean {
  return Math.abs(a[0] - b[0]) <= MERGE_EPS_MM && Math.abs(a[1] - b[1]) <= MERGE_EPS_MM;
}

/**
 * Convert a raw screen-space stroke into a closed contour document in mm.
 * Throws TooFewPoints when fewer than 3 distinct vertices remain; callers
 * discard the stroke and show a toast.
 */
export function strokeToContour(
  points: ScreenPoint[],
  v: Viewport,
  m: DatasetManifest,
  meta: StrokeMeta,
): ContourDoc {
  const mm: [number, number][] = [];
  for (const p of points) {
    const d = screenToDataset(v, p.x, p.y);
    const next: [number, number] = [d.x * m.pixel_spacing, d.y * m.pixel_spacing];
    const prev = mm[mm.length - 1];
    if (prev !== undefined && samePoint(prev, next)) continue;
    mm.push(next);
  }
  // the loop closes implicitly: drop a trailing vertex that re-hits the start
  const first = mm[0];
  while (mm.length > 1 && first !== undefined && samePoint(mm[mm.length - 1]!, first)) {
    mm.pop();
  }
  if (mm.length < 3) {
    throw new TooFewPoints(`stroke has ${mm.length} distinct points, need 3`);
  }
  return {
    slice: meta.sliceIndex,
    structure: meta.structureLabel,
    author: meta.authorId,
    outer: mm,
    holes: [],
  };
}
