import { readFileSync } from "fs";
import * as path from "path";
import * as jpeg from "jpeg-js";
import { PNG } from "pngjs";

export interface DecodedImage {
  width: number;
  height: number;
  rgba: Uint8Array;
}

export const IMAGE_EXTENSIONS = [".png", ".jpg", ".jpeg"];

export function isImageFile(file: string): boolean {
  return IMAGE_EXTENSIONS.includes(path.extname(file).toLowerCase());
}

export function imageIdFor(file: string): string {
  return path.basename(file, path.extname(file));
}

export function decodeImage(file: string): DecodedImage {
  const buf = readFileSync(file);
  const ext = path.extname(file).toLowerCase();
  if (ext === ".png") {
    const png = PNG.sync.read(buf);
    return { width: png.width, height: png.height, rgba: new Uint8Array(png.data) };
  }
  if (ext === ".jpg" || ext === ".jpeg") {
    const img = jpeg.decode(buf, { useTArray: true, formatAsRGBA: true });
    return { width: img.width, height: img.height, rgba: new Uint8Array(img.data) };
  }
  throw new Error(`unsupported image type: ${file}`);
}
