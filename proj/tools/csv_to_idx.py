#!/usr/bin/env python3
"""Convert a pixel CSV (784 pixels then a label per row) into IDX image and label files.

The source may be a .csv, a .csv.gz, or a wheel/zip archive containing one.
"""

import argparse
import gzip
import struct
import zipfile
from pathlib import Path


def read_rows(source: Path, member: str | None) -> list[str]:
    if zipfile.is_zipfile(source):
        with zipfile.ZipFile(source) as z:
            candidates = [n for n in z.namelist() if n.endswith(".csv.gz")]
            name = member or next((n for n in candidates if "mnist" in n), candidates[0])
            raw = z.read(name)
            if name.endswith(".gz"):
                raw = gzip.decompress(raw)
    elif source.suffix == ".gz":
        raw = gzip.decompress(source.read_bytes())
    else:
        raw = source.read_bytes()
    return [line for line in raw.decode().splitlines() if line.strip()]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--member", help="archive member to read")
    parser.add_argument("--rows", type=int, default=28)
    parser.add_argument("--cols", type=int, default=28)
    args = parser.parse_args()

    pixels = args.rows * args.cols
    images = bytearray()
    labels = bytearray()
    rows = read_rows(args.source, args.member)
    for line in rows:
        fields = [int(float(x)) for x in line.split(",")]
        if len(fields) != pixels + 1:
            raise SystemExit(f"expected {pixels + 1} fields, got {len(fields)}")
        images.extend(bytes(fields[:pixels]))
        labels.append(fields[pixels])

    args.out_dir.mkdir(parents=True, exist_ok=True)
    n = len(rows)
    (args.out_dir / "train-images-idx3-ubyte").write_bytes(
        struct.pack(">IIII", 0x803, n, args.rows, args.cols) + images)
    (args.out_dir / "train-labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, n) + labels)
    print(f"wrote {n} images to {args.out_dir}")


if __name__ == "__main__":
    main()
