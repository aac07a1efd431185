// World-to-screen mapping that letterboxes the map into the canvas while
// preserving aspect ratio. World y grows upward, screen y grows downward.

import { MapInfo } from "./types";

export interface Transform {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  worldHeight: number;
  originX: number;
  originY: number;
}

export function fitTransform(
  map: MapInfo,
  canvasWidth: number,
  canvasHeight: number,
  margin = 10,
): Transform {
  const worldW = map.width * map.resolution;
  const worldH = map.height * map.resolution;
  const scale = Math.min(
    (canvasWidth - 2 * margin) / worldW,
    (canvasHeight - 2 * margin) / worldH,
  );
  const offsetX = (canvasWidth - worldW * scale) / 2;
  const offsetY = (canvasHeight - worldH * scale) / 2;
  return {
    scale,
    offsetX,
    offsetY,
    worldHeight: worldH,
    originX: map.origin.x,
    originY: map.origin.y,
  };
}

export function worldToScreen(t: Transform, x: number, y: number): [number, number] {
  const sx = t.offsetX + (x - t.originX) * t.scale;
  const sy = t.offsetY + (t.worldHeight - (y - t.originY)) * t.scale;
  return [sx, sy];
}

export function screenToWorld(t: Transform, sx: number, sy: number): [number, number] {
  const x = (sx - t.offsetX) / t.scale + t.originX;
  const y = t.worldHeight - (sy - t.offsetY) / t.scale + t.originY;
  return [x, y];
}
