#!/usr/bin/env python3
"""Convert the digit JSON files shipped in the npm `mnist` package into IDX files.

The package stores 10,000 MNIST digits as 784 floats per image, each the original
byte divided by 255 and rounded to three decimals. round(v * 255) recovers the byte.

usage: mnist_from_npm.py <package/src/digits> <out_dir>
"""
import json
import struct
import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    digits_dir, out_dir = Path(sys.argv[1]), Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)

    images = bytearray()
    labels = bytearray()
    count = 0
    for digit in range(10):
        raw = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
        if len(raw) % 784:
            raise ValueError(f"{digit}.json: length {len(raw)} is not a multiple of 784")
        for v in raw:
            b = round(v * 255)
            if not 0 <= b <= 255:
                raise ValueError(f"pixel out of range: {v}")
            images.append(b)
        n = len(raw) // 784
        labels.extend([digit] * n)
        count += n

    (out_dir / "images-idx3-ubyte").write_bytes(
        struct.pack(">IIII", 0x803, count, 28, 28) + bytes(images))
    (out_dir / "labels-idx1-ubyte").write_bytes(
        struct.pack(">II", 0x801, count) + bytes(labels))
    print(f"wrote {count} images to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
