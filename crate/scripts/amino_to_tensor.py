#!/usr/bin/env python3
"""Convert the amino acid fluorescence dataset to the qzcpd tensor text format.

The dataset (Bro, 1998) is distributed as `claus.mat` from the University of
Copenhagen multi-way data page (models.life.ku.dk, "Amino Acid fluorescence").
Its variable `X` holds 5 samples x 201 emission x 61 excitation wavelengths.

    python3 scripts/amino_to_tensor.py claus.mat data/amino.txt
    qzcpd fluor --data data/amino.txt --snr-range -20:20:5 --out out/fluor

Requires numpy and scipy.
"""

import argparse
import sys

import numpy as np
from scipy.io import loadmat

EXPECTED = (5, 201, 61)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("mat", help="path to claus.mat")
    parser.add_argument("out", help="output tensor file")
    parser.add_argument("--var", default="X", help="variable holding the tensor (default: X)")
    args = parser.parse_args()

    data = loadmat(args.mat)
    if args.var not in data:
        print(f"{args.mat} has no variable {args.var!r}", file=sys.stderr)
        return 1
    x = np.asarray(data[args.var], dtype=float)
    if x.shape != EXPECTED:
        print(f"expected shape {EXPECTED}, found {x.shape}", file=sys.stderr)
        return 1
    if not np.all(np.isfinite(x)):
        print("tensor contains missing or non-finite entries", file=sys.stderr)
        return 1

    with open(args.out, "w") as f:
        f.write(f"order {x.ndim}\n")
        f.write(" ".join(str(n) for n in x.shape) + "\n")
        f.write("real\n")
        for v in x.flatten(order="F"):
            f.write(f"{float(v)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
