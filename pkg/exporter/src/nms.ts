import { CanvasBox } from "./types";

function iou(a: CanvasBox, b: CanvasBox): number {
  const ax1 = a.cx - a.w / 2;
  const ax2 = a.cx + a.w / 2;
  const ay1 = a.cy - a.h / 2;
  const ay2 = a.cy + a.h / 2;
  const bx1 = b.cx - b.w / 2;
  const bx2 = b.cx + b.w / 2;
  const by1 = b.cy - b.h / 2;
  const by2 = b.cy + b.h / 2;
  const iw = Math.min(ax2, bx2) - Math.max(ax1, bx1);
  const ih = Math.min(ay2, by2) - Math.max(ay1, by1);
  if (iw <= 0 || ih <= 0) return 0;
  const inter = iw * ih;
  const union = a.w * a.h + b.w * b.h - inter;
  return union > 0 ? inter / union : 0;
}

/**
 * The detector's native suppression pass: visit boxes in descending
 * confidence (ties by input index) and keep one only if its IoU with
 * every kept box of the same class stays at or below the threshold.
 */
export function greedyNms(boxes: CanvasBox[], iouThreshold: number): CanvasBox[] {
  const order = boxes
    .map((_, i) => i)
    .sort((a, b) => boxes[b].confidence - boxes[a].confidence || a - b);
  const kept: CanvasBox[] = [];
  for (const i of order) {
    const candidate = boxes[i];
    const clear = kept.every(
      (k) => k.classId !== candidate.classId || iou(k, candidate) <= iouThreshold
    );
    if (clear) kept.push(candidate);
  }
  return kept;
}
