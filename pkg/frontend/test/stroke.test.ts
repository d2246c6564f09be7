import { describe, expect, it } from "vitest";
import { strokeToContour, TooFewPoints } from "../src/stroke.js";
import type { DatasetManifest } from "../src/tiles.js";
import type { Viewport } from "../src/viewport.js";

const MANIFEST: DatasetManifest = {
  dataset_id: "demo",
  slice_count: 8,
  slice_width_px: 1024,
  slice_height_px: 1024,
  pixel_spacing: 0.5,
  slice_spacing: 1.0,
  tile_size: 256,
  zoom_levels: 3,
};

const VIEW: Viewport = {
  sliceIndex: 3,
  centerX: 100,
  centerY: 100,
  scale: 2,
  canvasW: 512,
  canvasH: 512,
};

const META = { sliceIndex: 3, structureLabel: "femur", authorId: "alice" };

describe("strokeToContour", () => {
  it("converts a traced square from screen px to dataset mm", () => {
    // screen -> dataset px: centerX + (sx - 256) / 2; dataset px -> mm: x 0.5
    const stroke = [
      { x: 256, y: 256 }, // dataset (100, 100) px -> (50, 50) mm
      { x: 296, y: 256 }, // (120, 100) px -> (60, 50) mm
      { x: 296, y: 296 }, // (120, 120) px -> (60, 60) mm
      { x: 256, y: 296 }, // (100, 120) px -> (50, 60) mm
    ];
    const doc = strokeToContour(stroke, VIEW, MANIFEST, META);
    expect(doc.slice).toBe(3);
    expect(doc.structure).toBe("femur");
    expect(doc.author).toBe("alice");
    expect(doc.holes).toEqual([]);
    expect(doc.outer).toHaveLength(4);
    const want = [
      [50, 50],
      [60, 50],
      [60, 60],
      [50, 60],
    ];
    for (let i = 0; i < 4; i++) {
      expect(doc.outer[i]![0]).toBeCloseTo(want[i]![0]!, 9);
      expect(doc.outer[i]![1]).toBeCloseTo(want[i]![1]!, 9);
    }
  });

  it("drops consecutive duplicate samples", () => {
    const stroke = [
      { x: 256, y: 256 },
      { x: 256, y: 256 }, // pointer hovered in place
      { x: 296, y: 256 },
      { x: 296, y: 256 },
      { x: 296, y: 296 },
    ];
    const doc = strokeToContour(stroke, VIEW, MANIFEST, META);
    expect(doc.outer).toHaveLength(3);
  });

  it("removes the explicit closure point a round stroke ends with", () => {
    const stroke = [
      { x: 256, y: 256 },
      { x: 296, y: 256 },
      { x: 296, y: 296 },
      { x: 256, y: 256 }, // finger returned to the start
    ];
    const doc = strokeToContour(stroke, VIEW, MANIFEST, META);
    expect(doc.outer).toHaveLength(3);
    expect(doc.outer[0]).not.toEqual(doc.outer[2]);
  });

  it("rejects strokes that collapse below 3 distinct points", () => {
    expect(() =>
      strokeToContour([{ x: 10, y: 10 }, { x: 40, y: 10 }], VIEW, MANIFEST, META),
    ).toThrow(TooFewPoints);
    // three samples but only two survive dedupe + closure trimming
    expect(() =>
      strokeToContour(
        [
          { x: 10, y: 10 },
          { x: 40, y: 10 },
          { x: 10, y: 10 },
        ],
        VIEW,
        MANIFEST,
        META,
      ),
    ).toThrow(TooFewPoints);
  });
});
