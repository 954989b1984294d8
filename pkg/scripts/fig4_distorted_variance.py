"""Uncertainty product of the distorted coherent states against r = |z|."""
import argparse
import sys

import numpy as np

from biosc.cli import format_table
from biosc.coherent import distorted_variance, distorted_variance_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--w", type=float, nargs="+", default=[0.1, 0.5, 1.0, 2.0, 3.0])
    ap.add_argument("--r-max", type=float, default=6.0)
    ap.add_argument("--n", type=int, default=121)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    r = np.linspace(0, args.r_max, args.n)
    cols, gap = [r], 0.0
    for w in args.w:
        closed = np.array([distorted_variance(x, w) for x in r])
        matrix = np.array([distorted_variance_matrix(x, w) for x in r])
        gap = max(gap, float(np.max(np.abs(closed - matrix))))
        cols.append(closed)
    text = format_table(["r"] + [f"dXdP[w={w!r}]" for w in args.w],
                        np.column_stack(cols).tolist(), {"matrix_route_gap": gap}, "csv")
    if args.out == "-":
        sys.stdout.write(text)
    else:
        open(args.out, "w").write(text)
    print(f"closed vs <I_w>/2: max gap {gap:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
