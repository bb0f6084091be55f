import { EDGE_TOL } from "./types";

export interface Violation {
  line: number;
  message: string;
}

const FIELDS = ["image_id", "class_id", "cx", "cy", "w", "h", "confidence"];

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/**
 * Schema check for interchange detection files, deliberately written
 * against the format description rather than shared with any parser, so
 * producer and consumer cross-validate each other.
 *
 * '#'-prefixed lines are metadata, not records, and are skipped. An
 * empty file is valid (zero detections). Returns one violation per
 * offending line; an empty list means the file is valid.
 */
export function validateInterchange(content: string): Violation[] {
  const violations: Violation[] = [];
  const lines = content.split("\n");
  for (let n = 0; n < lines.length; n++) {
    const line = lines[n].trim();
    const lineno = n + 1;
    if (line === "" || line.startsWith("#")) continue;

    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch (e) {
      violations.push({ line: lineno, message: `invalid JSON: ${(e as Error).message}` });
      continue;
    }
    if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
      violations.push({ line: lineno, message: "record is not a JSON object" });
      continue;
    }
    const rec = obj as Record<string, unknown>;

    const missing = FIELDS.filter((f) => !(f in rec));
    const unknown = Object.keys(rec).filter((k) => !FIELDS.includes(k));
    if (missing.length) {
      violations.push({ line: lineno, message: `missing field(s): ${missing.join(", ")}` });
      continue;
    }
    if (unknown.length) {
      violations.push({ line: lineno, message: `unknown field(s): ${unknown.join(", ")}` });
      continue;
    }

    if (typeof rec.image_id !== "string" || rec.image_id === "") {
      violations.push({ line: lineno, message: "image_id must be a non-empty string" });
      continue;
    }
    if (typeof rec.class_id !== "number" || !Number.isInteger(rec.class_id) || rec.class_id < 0) {
      violations.push({ line: lineno, message: "class_id must be a non-negative integer" });
      continue;
    }
    const coords = ["cx", "cy", "w", "h", "confidence"] as const;
    const bad = coords.find((k) => !isFiniteNumber(rec[k]));
    if (bad) {
      violations.push({ line: lineno, message: `${bad} must be a finite number` });
      continue;
    }
    const cx = rec.cx as number;
    const cy = rec.cy as number;
    const w = rec.w as number;
    const h = rec.h as number;
    const confidence = rec.confidence as number;

    if (w <= 0 || h <= 0) {
      violations.push({ line: lineno, message: `box extents must be positive (w=${w}, h=${h})` });
      continue;
    }
    const corners = [cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2];
    if (corners.some((c) => c < -EDGE_TOL || c > 1 + EDGE_TOL)) {
      violations.push({ line: lineno, message: "box corners escape the unit square" });
      continue;
    }
    if (confidence < 0 || confidence > 1) {
      violations.push({ line: lineno, message: `confidence ${confidence} outside [0, 1]` });
    }
  }
  return violations;
}
