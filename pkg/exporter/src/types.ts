export const DEFAULT_IMG_SIZE = 416;
export const DEFAULT_CONF = 0.25;
export const DEFAULT_NMS_IOU = 0.45;

// normalized coordinates may overshoot the unit square by at most this
export const EDGE_TOL = 1e-6;

export interface ExportJob {
  modelPath: string;
  imageDir: string;
  detectionsPath: string;
  manifestPath: string;
  imgSize: number;
  confThreshold: number;
  nmsIouThreshold: number;
  // strict omits the '#' metadata sidecar line the lenient interchange
  // parser tolerates
  strict: boolean;
}

/** One detection in original-image normalized coordinates. */
export interface DetectionRecord {
  image_id: string;
  class_id: number;
  cx: number;
  cy: number;
  w: number;
  h: number;
  confidence: number;
}

/** One detection in model-canvas pixels, before un-mapping. */
export interface CanvasBox {
  cx: number;
  cy: number;
  w: number;
  h: number;
  classId: number;
  confidence: number;
}

export interface ImageSummary {
  imageId: string;
  file: string;
  detections: number;
  ms: number;
}

export interface ExportSummary {
  model: string;
  settings: {
    imgSize: number;
    confThreshold: number;
    nmsIouThreshold: number;
  };
  images: ImageSummary[];
  skipped: string[];
  totalMs: number;
  meanMsPerImage: number;
  deterministic: boolean;
}

export interface ManifestEntry {
  image_id: string;
  width: number;
  height: number;
  image: string;
}
