import { InferenceSession, Tensor } from "onnxruntime-node";
import { CanvasBox } from "./types";

export interface Backend {
  run(chw: Float32Array, canvas: number): Promise<CanvasBox[]>;
  confThreshold: number;
}

/**
 * ONNX session wrapper. Expects a single image input and a
 * [1, N, 5 + numClasses] output of (cx, cy, w, h, objectness,
 * class scores) rows in canvas pixels, the usual single-stage detector
 * head layout. Confidence is objectness times the best class score.
 */
export class OnnxBackend implements Backend {
  private constructor(
    private session: InferenceSession,
    readonly confThreshold: number
  ) {}

  static async load(modelPath: string, confThreshold: number): Promise<OnnxBackend> {
    // single-threaded so reductions sum in a fixed order and repeated
    // runs produce byte-identical outputs
    const session = await InferenceSession.create(modelPath, {
      executionProviders: ["cpu"],
      graphOptimizationLevel: "all",
      intraOpNumThreads: 1,
      interOpNumThreads: 1,
    });
    if (session.inputNames.length !== 1 || session.outputNames.length !== 1) {
      throw new Error(
        `expected a single-input single-output model, got ` +
          `${session.inputNames.length} inputs / ${session.outputNames.length} outputs`
      );
    }
    return new OnnxBackend(session, confThreshold);
  }

  async run(chw: Float32Array, canvas: number): Promise<CanvasBox[]> {
    const input = new Tensor("float32", chw, [1, 3, canvas, canvas]);
    const outputs = await this.session.run({ [this.session.inputNames[0]]: input });
    const out = outputs[this.session.outputNames[0]];
    const dims = out.dims;
    if (dims.length !== 3 || dims[2] < 6) {
      throw new Error(`unexpected output shape [${dims.join(", ")}]`);
    }
    const rows = dims[1];
    const stride = dims[2];
    const numClasses = stride - 5;
    const data = out.data as Float32Array;
    const boxes: CanvasBox[] = [];
    for (let r = 0; r < rows; r++) {
      const base = r * stride;
      const obj = data[base + 4];
      let best = 0;
      let bestClass = 0;
      for (let c = 0; c < numClasses; c++) {
        const score = data[base + 5 + c];
        if (score > best) {
          best = score;
          bestClass = c;
        }
      }
      const confidence = obj * best;
      if (confidence < this.confThreshold) continue;
      boxes.push({
        cx: data[base],
        cy: data[base + 1],
        w: data[base + 2],
        h: data[base + 3],
        classId: bestClass,
        confidence,
      });
    }
    return boxes;
  }
}
