import { describe, expect, it } from "vitest";

import { fitTransform, screenToWorld, worldToScreen } from "./transform";
import { MapInfo } from "./types";

const MAP: MapInfo = {
  resolution: 0.25,
  origin: { x: 0, y: 0 },
  width: 30,
  height: 30,
  rows: Array(30).fill(".".repeat(30)),
};

const WIDE_MAP: MapInfo = { ...MAP, width: 60, rows: Array(30).fill(".".repeat(60)) };

describe("fitTransform", () => {
  it("fits a square world into a square canvas with margins", () => {
    const t = fitTransform(MAP, 760, 760, 10);
    expect(t.scale).toBeCloseTo((760 - 20) / 7.5, 6);
    expect(t.offsetX).toBeCloseTo(10, 6);
    expect(t.offsetY).toBeCloseTo(10, 6);
  });

  it("preserves aspect ratio for non-square worlds", () => {
    const t = fitTransform(WIDE_MAP, 800, 800, 0);
    // world is 15 x 7.5 m; width limits the scale
    expect(t.scale).toBeCloseTo(800 / 15, 6);
    expect(t.offsetY).toBeCloseTo((800 - 7.5 * t.scale) / 2, 6);
  });
});

describe("worldToScreen", () => {
  it("flips the y axis (world up is screen up)", () => {
    const t = fitTransform(MAP, 760, 760, 10);
    const [, lowY] = worldToScreen(t, 0, 0);
    const [, highY] = worldToScreen(t, 0, 7.5);
    expect(highY).toBeLessThan(lowY);
  });

  it("round-trips through screenToWorld", () => {
    const t = fitTransform(MAP, 760, 520, 10);
    for (const [x, y] of [
      [0, 0],
      [3.75, 3.75],
      [7.5, 7.5],
      [1.2, 6.1],
    ]) {
      const [sx, sy] = worldToScreen(t, x, y);
      const [wx, wy] = screenToWorld(t, sx, sy);
      expect(wx).toBeCloseTo(x, 9);
      expect(wy).toBeCloseTo(y, 9);
    }
  });

  it("maps map corners inside the canvas", () => {
    const t = fitTransform(MAP, 400, 300, 10);
    for (const [x, y] of [
      [0, 0],
      [7.5, 0],
      [0, 7.5],
      [7.5, 7.5],
    ]) {
      const [sx, sy] = worldToScreen(t, x, y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(400);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(300);
    }
  });
});
