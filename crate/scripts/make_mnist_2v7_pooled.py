#!/usr/bin/env python3
"""Regenerate data/mnist_2v7_pooled.csv from the standard MNIST IDX files.

The committed fixture is the first 500 training images of digit 2 and of
digit 7 (in training-set order), 4x4 average-pooled from 28x28 down to 7x7
= 49 attributes. Pool values are multiples of 1/16, so the CSV decimals
are exact.

Usage: make_mnist_2v7_pooled.py <dir with train-images-idx3-ubyte.gz and
       train-labels-idx1-ubyte.gz> [out.csv]
"""

import gzip
import struct
import sys


def read_images(path):
    with gzip.open(path, "rb") as f:
        magic, n, rows, cols = struct.unpack(">IIII", f.read(16))
        assert magic == 2051, f"bad image magic {magic}"
        data = f.read(n * rows * cols)
    return n, rows, cols, data


def read_labels(path):
    with gzip.open(path, "rb") as f:
        magic, n = struct.unpack(">II", f.read(8))
        assert magic == 2049, f"bad label magic {magic}"
        return f.read(n)


def pool4(img, rows, cols):
    out = []
    for br in range(rows // 4):
        for bc in range(cols // 4):
            s = 0
            for r in range(4):
                for c in range(4):
                    s += img[(br * 4 + r) * cols + bc * 4 + c]
            out.append(s / 16.0)
    return out


def fmt(v):
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return s if s else "0"


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    src = sys.argv[1].rstrip("/")
    out_path = sys.argv[2] if len(sys.argv) > 2 else "data/mnist_2v7_pooled.csv"

    n, rows, cols, images = read_images(f"{src}/train-images-idx3-ubyte.gz")
    labels = read_labels(f"{src}/train-labels-idx1-ubyte.gz")
    assert (rows, cols) == (28, 28)

    out_rows = []
    for digit in (2, 7):
        taken = 0
        for i in range(n):
            if labels[i] != digit:
                continue
            img = images[i * rows * cols : (i + 1) * rows * cols]
            out_rows.append((pool4(img, rows, cols), digit))
            taken += 1
            if taken == 500:
                break
        assert taken == 500, f"only {taken} images of digit {digit}"

    names = [f"p{r}_{c}" for r in range(7) for c in range(7)]
    with open(out_path, "w") as f:
        f.write(",".join(names + ["digit"]) + "\n")
        for values, digit in out_rows:
            f.write(",".join(fmt(v) for v in values) + f",{digit}\n")
    print(f"wrote {len(out_rows)} rows to {out_path}")


if __name__ == "__main__":
    main()
