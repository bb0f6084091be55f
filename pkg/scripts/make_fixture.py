#!/usr/bin/env python3
"""Generate a synthetic dataset plus detection files for demos and benchmarks.

Writes YOLO label files, a manifest, a perfect detections file (ground
truth replayed at confidence 1.0) and a noisy one (jittered, dropped,
spurious). Everything is seeded, so a given command line always produces
the same corpus.
"""

import argparse
import random
from pathlib import Path

from loggauge.synth import (
    make_dataset,
    noisy_detections,
    perfect_detections,
    write_dataset,
    write_detections_file,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=Path, help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--images", type=int, default=8)
    ap.add_argument("--max-boxes", type=int, default=10)
    ap.add_argument("--jitter", type=float, default=0.15, help="box corner noise fraction")
    ap.add_argument("--drop", type=float, default=0.2, help="probability a gt box is missed")
    ap.add_argument("--spurious", type=float, default=0.3, help="extra false boxes per image")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    ds = make_dataset(rng, n_images=args.images, max_boxes=args.max_boxes, min_boxes=1)
    manifest = write_dataset(ds, args.out)
    perfect = write_detections_file(perfect_detections(ds), args.out / "perfect.jsonl")
    noisy = write_detections_file(
        noisy_detections(
            rng, ds, jitter=args.jitter, drop_rate=args.drop, spurious_rate=args.spurious
        ),
        args.out / "noisy.jsonl",
    )
    print(f"manifest:  {manifest}")
    print(f"perfect:   {perfect}")
    print(f"noisy:     {noisy}")
    print(f"images:    {len(ds.manifest)}  instances: {ds.num_instances}")
    print(f"try:       loggauge eval {manifest} {noisy}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
