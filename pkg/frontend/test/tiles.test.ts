// Tile selection checked against a brute-force oracle: enumerate every tile
// in the grid and keep those whose rectangle intersects the visible slice
// rectangle, with zoom picked by linear scan instead of logarithms.

import { describe, expect, it } from "vitest";
import { chooseZoom, gridSize, tilePath, visibleTiles } from "../src/tiles.js";
import type { DatasetManifest, TileAddress } from "../src/tiles.js";
import type { Viewport } from "../src/viewport.js";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function oracleZoom(scale: number, zoomLevels: number): number {
  let best = 0;
  for (let z = 0; z < zoomLevels; z++) {
    if (2 ** z <= 1 / scale) best = z;
  }
  return best;
}

/**
 * Independent reimplementation: clamp the closed view rectangle by hand,
 * then test every tile in the grid with an interval-overlap predicate
 * (tile cells are half-open, the view rectangle is closed, so an edge
 * sitting exactly on a cell boundary keeps the cell beyond it).
 */
function oracleTiles(v: Viewport, m: DatasetManifest): TileAddress[] {
  const hw = v.canvasW / (2 * v.scale);
  const hh = v.canvasH / (2 * v.scale);
  const x0 = Math.max(v.centerX - hw, 0);
  const y0 = Math.max(v.centerY - hh, 0);
  const x1 = Math.min(v.centerX + hw, m.slice_width_px);
  const y1 = Math.min(v.centerY + hh, m.slice_height_px);
  if (x0 > x1 || y0 > y1) return [];
  const zoom = oracleZoom(v.scale, m.zoom_levels);
  const span = m.tile_size * 2 ** zoom;
  const levelW = Math.ceil(m.slice_width_px / 2 ** zoom);
  const levelH = Math.ceil(m.slice_height_px / 2 ** zoom);
  const cols = Math.ceil(levelW / m.tile_size);
  const rows = Math.ceil(levelH / m.tile_size);
  const out: TileAddress[] = [];
  for (let ty = 0; ty < rows; ty++) {
    for (let tx = 0; tx < cols; tx++) {
      const hitX = tx * span <= x1 && x0 < (tx + 1) * span;
      const hitY = ty * span <= y1 && y0 < (ty + 1) * span;
      if (hitX && hitY) out.push({ sliceIndex: v.sliceIndex, zoom, x: tx, y: ty });
    }
  }
  return out;
}

function sortKey(t: TileAddress): string {
  return `${t.sliceIndex}:${t.zoom}:${t.y}:${t.x}`;
}

function sorted(tiles: TileAddress[]): TileAddress[] {
  return [...tiles].sort((a, b) => sortKey(a).localeCompare(sortKey(b)));
}

const DEMO: DatasetManifest = {
  dataset_id: "demo",
  slice_count: 8,
  slice_width_px: 1024,
  slice_height_px: 1024,
  pixel_spacing: 0.5,
  slice_spacing: 1.0,
  tile_size: 256,
  zoom_levels: 3,
};

describe("chooseZoom", () => {
  it("uses the native level when screen resolution matches or exceeds it", () => {
    expect(chooseZoom(1.0, 3)).toBe(0);
    expect(chooseZoom(2.0, 3)).toBe(0);
    expect(chooseZoom(64, 3)).toBe(0);
  });

  it("steps down one level each halving of scale", () => {
    expect(chooseZoom(0.5, 5)).toBe(1);
    expect(chooseZoom(0.25, 5)).toBe(2);
    expect(chooseZoom(0.125, 5)).toBe(3);
  });

  it("clamps to the coarsest stored level", () => {
    expect(chooseZoom(1 / 1024, 3)).toBe(2);
  });

  it("rejects non-positive scales", () => {
    expect(() => chooseZoom(0, 3)).toThrow(RangeError);
    expect(() => chooseZoom(-1, 3)).toThrow(RangeError);
  });

  it("agrees with a linear-scan oracle across a fine scale sweep", () => {
    for (let levels = 1; levels <= 6; levels++) {
      for (let i = -640; i <= 640; i++) {
        const scale = 2 ** (i / 100); // 1/64 .. 64, hits exact powers of two
        expect(chooseZoom(scale, levels)).toBe(oracleZoom(scale, levels));
      }
    }
  });
});

describe("gridSize", () => {
  it("quarters the tile count per zoom step on a 1024px slice", () => {
    expect(gridSize(DEMO, 0)).toEqual({ cols: 4, rows: 4 });
    expect(gridSize(DEMO, 1)).toEqual({ cols: 2, rows: 2 });
    expect(gridSize(DEMO, 2)).toEqual({ cols: 1, rows: 1 });
  });

  it("rounds partial tiles up", () => {
    const m = { ...DEMO, slice_width_px: 1025, slice_height_px: 700 };
    expect(gridSize(m, 0)).toEqual({ cols: 5, rows: 3 });
    expect(gridSize(m, 1)).toEqual({ cols: 3, rows: 2 });
  });
});

describe("visibleTiles", () => {
  it("512px canvas at scale 1 centered on a 1024px slice needs 9 tiles at zoom 0", () => {
    const v: Viewport = {
      sliceIndex: 2,
      centerX: 512,
      centerY: 512,
      scale: 1.0,
      canvasW: 512,
      canvasH: 512,
    };
    const tiles = visibleTiles(v, DEMO);
    expect(tiles).toHaveLength(9);
    expect(tiles.every((t) => t.zoom === 0 && t.sliceIndex === 2)).toBe(true);
    const xs = new Set(tiles.map((t) => t.x));
    const ys = new Set(tiles.map((t) => t.y));
    expect([...xs].sort()).toEqual([1, 2, 3]);
    expect([...ys].sort()).toEqual([1, 2, 3]);
  });

  it("whole slice at scale 0.25 is a single zoom-2 tile", () => {
    const v: Viewport = {
      sliceIndex: 0,
      centerX: 512,
      centerY: 512,
      scale: 0.25,
      canvasW: 512,
      canvasH: 512,
    };
    expect(visibleTiles(v, DEMO)).toEqual([{ sliceIndex: 0, zoom: 2, x: 0, y: 0 }]);
  });

  it("viewport entirely off the slice selects nothing", () => {
    const v: Viewport = {
      sliceIndex: 0,
      centerX: 5000,
      centerY: 5000,
      scale: 1.0,
      canvasW: 512,
      canvasH: 512,
    };
    expect(visibleTiles(v, DEMO)).toEqual([]);
  });

  it("an edge exactly on a tile boundary keeps the tile beyond it", () => {
    // canvas spans [256, 768] in dataset px: boundaries at 256 and 768 touch
    // columns 0 and 3 only at their edges, which still counts.
    const v: Viewport = {
      sliceIndex: 0,
      centerX: 512,
      centerY: 512,
      scale: 1.0,
      canvasW: 512,
      canvasH: 512,
    };
    const tiles = visibleTiles(v, DEMO);
    expect(sorted(tiles)).toEqual(sorted(oracleTiles(v, DEMO)));
    expect(tiles.some((t) => t.x === 1 && t.y === 1)).toBe(true);
    expect(tiles.some((t) => t.x === 3 && t.y === 3)).toBe(true);
  });

  it("matches the brute-force oracle on 100 random viewports", () => {
    const rand = mulberry32(0xc0ffee);
    for (let i = 0; i < 100; i++) {
      const m: DatasetManifest = {
        dataset_id: "rand",
        slice_count: 12,
        slice_width_px: 200 + Math.floor(rand() * 2000),
        slice_height_px: 200 + Math.floor(rand() * 2000),
        pixel_spacing: 0.5,
        slice_spacing: 1.0,
        tile_size: rand() < 0.5 ? 128 : 256,
        zoom_levels: 1 + Math.floor(rand() * 5),
      };
      const scale = 2 ** (rand() * 9 - 6); // log-uniform in [1/64, 8]
      const v: Viewport = {
        sliceIndex: Math.floor(rand() * m.slice_count),
        centerX: (rand() * 2 - 0.5) * m.slice_width_px,
        centerY: (rand() * 2 - 0.5) * m.slice_height_px,
        scale,
        canvasW: 256 + Math.floor(rand() * 768),
        canvasH: 256 + Math.floor(rand() * 768),
      };
      const got = sorted(visibleTiles(v, m));
      const want = sorted(oracleTiles(v, m));
      expect(got, `case ${i}: scale=${scale} center=(${v.centerX},${v.centerY})`).toEqual(want);
    }
  });
});

describe("tilePath", () => {
  it("addresses tiles under the dataset's slice/zoom directory", () => {
    expect(tilePath("demo", { sliceIndex: 3, zoom: 1, x: 2, y: 0 })).toBe(
      "/datasets/demo/slices/3/1/2_0.png",
    );
  });
});
