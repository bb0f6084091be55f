#!/usr/bin/env python3
"""Build the tiny ONNX detector used by the test suite.

The graph takes a [1, 3, S, S] image and returns a fixed [1, 3, 6] row
tensor (cx, cy, w, h in canvas pixels, objectness, one class score). The
rows are multiplied by (mean(images) * 0 + 1) so the session genuinely
runs the graph, but the output is constant and exactly reproducible.
Boxes sit inside the central 416-canvas band [52, 364] so they stay
within the original image for any aspect ratio between 3:4 and 4:3 after
letterbox un-mapping.

The ONNX protobuf is emitted directly via the protobuf wire format, so
regeneration needs nothing beyond the standard library. The file is
checked in; run this only to change the fixture.

Run once to refresh test/fixtures/tiny.onnx.
"""

import argparse
import struct
from pathlib import Path

ROWS = [
    # cx,    cy,    w,    h,   obj,  cls
    [208.0, 208.0, 60.0, 80.0, 0.95, 0.9473684210526315],  # conf 0.90
    [150.0, 230.0, 40.0, 40.0, 0.90, 0.8333333333333334],  # conf 0.75
    [300.0, 180.0, 80.0, 50.0, 0.80, 0.75],                # conf 0.60
]

FLOAT = 1  # TensorProto.DataType


def _varint(n: int) -> bytes:
    out = bytearray()
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _field(num: int, wire_type: int) -> bytes:
    return _varint((num << 3) | wire_type)


def _int(num: int, value: int) -> bytes:
    return _field(num, 0) + _varint(value)


def _bytes(num: int, payload: bytes) -> bytes:
    return _field(num, 2) + _varint(len(payload)) + payload


def _str(num: int, text: str) -> bytes:
    return _bytes(num, text.encode("utf-8"))


def tensor(name: str, dims: list[int], values: list[float]) -> bytes:
    # TensorProto: dims=1, data_type=2, name=8, raw_data=9
    body = b"".join(_int(1, d) for d in dims)
    body += _int(2, FLOAT)
    body += _str(8, name)
    body += _bytes(9, struct.pack(f"<{len(values)}f", *values))
    return body


def value_info(name: str, dims: list[int]) -> bytes:
    # Dimension.dim_value=1; TensorShapeProto.dim=1
    shape = b"".join(_bytes(1, _int(1, d)) for d in dims)
    # TypeProto.Tensor: elem_type=1, shape=2; TypeProto.tensor_type=1
    tensor_type = _int(1, FLOAT) + _bytes(2, shape)
    # ValueInfoProto: name=1, type=2
    return _str(1, name) + _bytes(2, _bytes(1, tensor_type))


def node(op_type: str, inputs: list[str], outputs: list[str], attrs: bytes = b"") -> bytes:
    # NodeProto: input=1, output=2, name=3, op_type=4, attribute=5
    body = b"".join(_str(1, i) for i in inputs)
    body += b"".join(_str(2, o) for o in outputs)
    body += _str(3, f"{op_type}_{outputs[0]}")
    body += _str(4, op_type)
    body += attrs
    return body


def int_attr(name: str, value: int) -> bytes:
    # AttributeProto: name=1, i=3, type=20 (INT=2)
    return _bytes(5, _str(1, name) + _int(3, value) + _int(20, 2))


def build_model(imgsz: int) -> bytes:
    flat = [v for row in ROWS for v in row]
    nodes = [
        node("ReduceMean", ["images"], ["mean"], int_attr("keepdims", 0)),
        node("Mul", ["mean", "zero"], ["zeroed"]),
        node("Add", ["zeroed", "one"], ["anchor"]),
        node("Mul", ["rows", "anchor"], ["output"]),
    ]
    initializers = [
        tensor("zero", [], [0.0]),
        tensor("one", [], [1.0]),
        tensor("rows", [1, len(ROWS), 6], flat),
    ]
    # GraphProto: node=1, name=2, initializer=5, input=11, output=12
    graph = b"".join(_bytes(1, n) for n in nodes)
    graph += _str(2, "tiny_detector")
    graph += b"".join(_bytes(5, t) for t in initializers)
    graph += _bytes(11, value_info("images", [1, 3, imgsz, imgsz]))
    graph += _bytes(12, value_info("output", [1, len(ROWS), 6]))
    # ModelProto: ir_version=1, producer_name=2, graph=7,
    # opset_import=8 (OperatorSetIdProto: domain=1, version=2)
    model = _int(1, 8)
    model += _str(2, "tiny-detector-fixture")
    model += _bytes(7, graph)
    model += _bytes(8, _str(1, "") + _int(2, 17))
    return model


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "test" / "fixtures" / "tiny.onnx",
    )
    ap.add_argument("--imgsz", type=int, default=416)
    args = ap.parse_args()

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_bytes(build_model(args.imgsz))
    print(f"wrote {args.out} ({args.out.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
