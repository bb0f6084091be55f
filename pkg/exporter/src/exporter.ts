import * as fs from "fs";
import * as path from "path";
import { performance } from "perf_hooks";
import { Backend, OnnxBackend } from "./backend";
import { decodeImage, imageIdFor, isImageFile } from "./images";
import { computeLetterbox, letterboxToTensor, unmapBox } from "./letterbox";
import { greedyNms } from "./nms";
import {
  DetectionRecord,
  ExportJob,
  ExportSummary,
  ImageSummary,
  ManifestEntry,
} from "./types";

/**
 * Run a detector over every image in a directory and write two files:
 * a JSONL detections file in normalized original-image coordinates and
 * a JSON manifest recording each image's true dimensions.
 *
 * Images are visited in sorted filename order so repeated runs emit
 * identical bytes. An image that fails to decode is skipped with a
 * warning and listed in the summary; a model that fails to load aborts
 * the whole export.
 */
export async function runExport(
  job: ExportJob,
  backend?: Backend
): Promise<ExportSummary> {
  const model = backend ?? (await OnnxBackend.load(job.modelPath, job.confThreshold));

  const files = fs.readdirSync(job.imageDir).filter(isImageFile).sort();
  const records: DetectionRecord[] = [];
  const manifest: ManifestEntry[] = [];
  const images: ImageSummary[] = [];
  const skipped: string[] = [];
  const t0 = performance.now();

  for (const file of files) {
    const full = path.join(job.imageDir, file);
    const tStart = performance.now();
    let decoded;
    try {
      decoded = decodeImage(full);
    } catch (e) {
      console.warn(`skipping unreadable image ${file}: ${(e as Error).message}`);
      skipped.push(file);
      continue;
    }
    const imageId = imageIdFor(file);
    const map = computeLetterbox(decoded.width, decoded.height, job.imgSize);
    const tensor = letterboxToTensor(decoded.rgba, decoded.width, decoded.height, map);
    const raw = await model.run(tensor, job.imgSize);
    const kept = greedyNms(raw, job.nmsIouThreshold);

    let count = 0;
    for (const box of kept) {
      const rec = unmapBox(box, map, decoded.width, decoded.height, imageId);
      if (rec === null) continue; // box fell entirely in the padding
      records.push(rec);
      count++;
    }
    manifest.push({
      image_id: imageId,
      width: decoded.width,
      height: decoded.height,
      image: relativeTo(job.manifestPath, full),
    });
    images.push({ imageId, file, detections: count, ms: performance.now() - tStart });
  }

  const summary: ExportSummary = {
    model: job.modelPath,
    settings: {
      imgSize: job.imgSize,
      confThreshold: job.confThreshold,
      nmsIouThreshold: job.nmsIouThreshold,
    },
    images,
    skipped,
    totalMs: performance.now() - t0,
    meanMsPerImage: images.length
      ? images.reduce((acc, s) => acc + s.ms, 0) / images.length
      : 0,
    deterministic: true,
  };

  writeDetections(job, summary, records);
  fs.writeFileSync(job.manifestPath, JSON.stringify(manifest, null, 2) + "\n");
  return summary;
}

function relativeTo(fromFile: string, target: string): string {
  const rel = path.relative(path.dirname(fromFile), target);
  // manifests are consumed cross-platform; keep forward slashes
  return rel.split(path.sep).join("/");
}

function writeDetections(
  job: ExportJob,
  summary: ExportSummary,
  records: DetectionRecord[]
): void {
  const lines: string[] = [];
  if (!job.strict) {
    // metadata sidecar; only the lenient interchange parser accepts it
    lines.push("# " + JSON.stringify({ model: job.modelPath, settings: summary.settings }));
  }
  for (const rec of records) {
    lines.push(JSON.stringify(rec));
  }
  fs.writeFileSync(job.detectionsPath, lines.length ? lines.join("\n") + "\n" : "");
}
