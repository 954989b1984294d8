"""sup_x |psi_n - phi_n| for n <= 4 along the AMM family as gamma grows."""
import argparse

import numpy as np

from biosc.model import amm_potential
from biosc.spectral import oscillator_limit_deviation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, nargs="+", default=[2, 20, 200, 2e3, 2e4, 1e6])
    args = ap.parse_args()

    x = np.linspace(-6, 6, 1201)
    print(f"{'gamma':>10} " + " ".join(f"{'n=' + str(n):>10}" for n in range(5)) + f" {'|V+2-x^2|':>10}")
    for g in args.gamma:
        dev = oscillator_limit_deviation(g)
        vgap = np.max(np.abs(amm_potential(x, g) - (x * x - 2)))
        print(f"{g:10.3g} " + " ".join(f"{d:10.2e}" for d in dev) + f" {vgap:10.2e}")


if __name__ == "__main__":
    main()
