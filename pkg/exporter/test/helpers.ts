import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { PNG } from "pngjs";

export const MODEL_PATH = path.resolve(process.cwd(), "test/fixtures/tiny.onnx");

export function makeTempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

export function writePng(file: string, width: number, height: number, seed = 0): void {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[i * 4] = (i * 31 + seed) % 256;
    png.data[i * 4 + 1] = (i * 17 + seed * 3) % 256;
    png.data[i * 4 + 2] = (i * 7 + seed * 5) % 256;
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(file, PNG.sync.write(png));
}

/**
 * Three images spanning landscape, portrait and square aspect ratios.
 * The fixture model emits boxes near the canvas center, so all of them
 * survive the letterbox un-mapping for these shapes.
 */
export function writeSampleImages(dir: string): string[] {
  const specs: [string, number, number][] = [
    ["creek_0001.png", 640, 480],
    ["creek_0002.png", 480, 640],
    ["creek_0003.png", 416, 416],
  ];
  for (const [name, w, h] of specs) {
    writePng(path.join(dir, name), w, h, w + h);
  }
  return specs.map(([name]) => name);
}
