#!/usr/bin/env node
import { readFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { runExport } from "./exporter";
import {
  DEFAULT_CONF,
  DEFAULT_IMG_SIZE,
  DEFAULT_NMS_IOU,
  ExportJob,
  ExportSummary,
} from "./types";
import { validateInterchange } from "./validate";

function printSummary(summary: ExportSummary): void {
  for (const img of summary.images) {
    console.log(
      `${img.imageId}: ${img.detections} detection(s) in ${img.ms.toFixed(1)} ms`
    );
  }
  for (const file of summary.skipped) {
    console.log(`skipped: ${file}`);
  }
  const n = summary.images.length;
  console.log(
    `processed ${n} image(s), skipped ${summary.skipped.length}, ` +
      `${summary.totalMs.toFixed(1)} ms total ` +
      `(${summary.meanMsPerImage.toFixed(1)} ms/image)`
  );
  if (!summary.deterministic) {
    console.log("warning: this backend does not guarantee repeatable outputs");
  }
}

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .scriptName("loggauge-export")
    .command(
      "export",
      "run a detector over an image directory and write detections + manifest",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true, describe: "ONNX model path" })
          .option("images", { type: "string", demandOption: true, describe: "image directory" })
          .option("out", { type: "string", demandOption: true, describe: "output detections JSONL" })
          .option("manifest", { type: "string", demandOption: true, describe: "output manifest JSON" })
          .option("imgsz", { type: "number", default: DEFAULT_IMG_SIZE, describe: "square model input size" })
          .option("conf", { type: "number", default: DEFAULT_CONF, describe: "confidence threshold" })
          .option("nms-iou", { type: "number", default: DEFAULT_NMS_IOU, describe: "NMS IoU threshold" })
          .option("lenient", {
            type: "boolean",
            default: false,
            describe: "prepend a '#' metadata line (rejected by strict parsers)",
          }),
      async (args) => {
        const job: ExportJob = {
          modelPath: args.model,
          imageDir: args.images,
          detectionsPath: args.out,
          manifestPath: args.manifest,
          imgSize: args.imgsz,
          confThreshold: args.conf,
          nmsIouThreshold: args["nms-iou"],
          strict: !args.lenient,
        };
        try {
          const summary = await runExport(job);
          printSummary(summary);
        } catch (e) {
          console.error(`export failed: ${(e as Error).message}`);
          exitCode = 2;
        }
      }
    )
    .command(
      "validate <path>",
      "schema-check an interchange detections file",
      (y) => y.positional("path", { type: "string", demandOption: true }),
      (args) => {
        let content: string;
        try {
          content = readFileSync(args.path as string, "utf8");
        } catch (e) {
          console.error(`cannot read ${args.path}: ${(e as Error).message}`);
          exitCode = 2;
          return;
        }
        const violations = validateInterchange(content);
        for (const v of violations) {
          console.log(`${args.path}:${v.line}: ${v.message}`);
        }
        if (violations.length) {
          console.log(`${violations.length} violation(s)`);
          exitCode = 1;
        } else {
          console.log("ok");
        }
      }
    )
    .demandCommand(1, "specify a command")
    .strict()
    .fail((msg, err) => {
      console.error(msg ?? err?.message ?? "unknown error");
      process.exit(2);
    })
    .parseAsync();
  return exitCode;
}

if (require.main === module) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
