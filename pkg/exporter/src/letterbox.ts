import { CanvasBox, DetectionRecord, EDGE_TOL } from "./types";

/** How an original image maps onto the square model canvas. */
export interface LetterboxMapping {
  scale: number;
  padX: number;
  padY: number;
  scaledW: number;
  scaledH: number;
  canvas: number;
}

export function computeLetterbox(
  width: number,
  height: number,
  canvas: number
): LetterboxMapping {
  if (width <= 0 || height <= 0 || canvas <= 0) {
    throw new Error(`bad letterbox dims ${width}x${height} -> ${canvas}`);
  }
  const scale = Math.min(canvas / width, canvas / height);
  const scaledW = width * scale;
  const scaledH = height * scale;
  return {
    scale,
    padX: (canvas - scaledW) / 2,
    padY: (canvas - scaledH) / 2,
    scaledW,
    scaledH,
    canvas,
  };
}

function clampUnit(v: number): number {
  if (v < 0) return 0;
  if (v > 1) return 1;
  return v;
}

/**
 * Map a canvas-pixel box back to normalized original-image coordinates.
 *
 * The padding is subtracted and the resize undone; corners are clamped
 * to the image so a box that grazes the padding stays valid. Returns
 * null when the box lies entirely in the padding (zero area after
 * clamping).
 */
export function unmapBox(
  box: CanvasBox,
  map: LetterboxMapping,
  width: number,
  height: number,
  imageId: string
): DetectionRecord | null {
  const x1 = clampUnit((box.cx - box.w / 2 - map.padX) / map.scale / width);
  const x2 = clampUnit((box.cx + box.w / 2 - map.padX) / map.scale / width);
  const y1 = clampUnit((box.cy - box.h / 2 - map.padY) / map.scale / height);
  const y2 = clampUnit((box.cy + box.h / 2 - map.padY) / map.scale / height);
  if (x2 - x1 <= 0 || y2 - y1 <= 0) return null;
  const rec: DetectionRecord = {
    image_id: imageId,
    class_id: box.classId,
    cx: (x1 + x2) / 2,
    cy: (y1 + y2) / 2,
    w: x2 - x1,
    h: y2 - y1,
    confidence: box.confidence,
  };
  assertInUnitSquare(rec);
  return rec;
}

/** Every emitted coordinate must stay inside the tolerance band. */
export function assertInUnitSquare(rec: DetectionRecord): void {
  const corners = [
    rec.cx - rec.w / 2,
    rec.cx + rec.w / 2,
    rec.cy - rec.h / 2,
    rec.cy + rec.h / 2,
  ];
  for (const c of corners) {
    if (!(c >= -EDGE_TOL && c <= 1 + EDGE_TOL)) {
      throw new Error(`box corner ${c} escapes the unit square for ${rec.image_id}`);
    }
  }
  if (!(rec.confidence >= 0 && rec.confidence <= 1)) {
    throw new Error(`confidence ${rec.confidence} out of range for ${rec.image_id}`);
  }
}

/**
 * Resize (nearest-neighbor) and pad an RGBA image into a normalized
 * CHW float tensor for the model.
 */
export function letterboxToTensor(
  rgba: Uint8Array,
  width: number,
  height: number,
  map: LetterboxMapping
): Float32Array {
  const s = map.canvas;
  const data = new Float32Array(3 * s * s).fill(0.5); // gray padding
  const x0 = Math.round(map.padX);
  const y0 = Math.round(map.padY);
  const w = Math.round(map.scaledW);
  const h = Math.round(map.scaledH);
  for (let y = 0; y < h; y++) {
    const srcY = Math.min(height - 1, Math.floor((y + 0.5) / map.scale));
    for (let x = 0; x < w; x++) {
      const srcX = Math.min(width - 1, Math.floor((x + 0.5) / map.scale));
      const src = (srcY * width + srcX) * 4;
      const dst = (y0 + y) * s + (x0 + x);
      data[dst] = rgba[src] / 255;
      data[s * s + dst] = rgba[src + 1] / 255;
      data[2 * s * s + dst] = rgba[src + 2] / 255;
    }
  }
  return data;
}
