"""Single-clone fidelity of the universal cloner against the guessing
baselines, for a range of clone counts."""
import argparse

import numpy as np

from qagency import cloning
from qagency.qstate import fidelity, pure_from_bloch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-m", type=int, default=cloning.MAX_CLONES)
    args = ap.parse_args()

    psi = pure_from_bloch(np.array([1.0, 2.0, 2.0]) / 3)
    print(f"{'m':>2} {'cloner':>8} {'formula':>8} {'keep+guess':>11} {'guess':>7}")
    for m in range(2, args.max_m + 1):
        got = fidelity(cloning.symmetric_clone(psi, m).marginal(0), psi)
        keep = cloning.haar_baseline(args.samples, args.seed, m=m, keep_original=True)
        guess = cloning.haar_baseline(args.samples, args.seed, m=m)
        print(f"{m:>2} {got:8.5f} {cloning.universal_clone_fidelity(m):8.5f} "
              f"{keep:11.5f} {guess:7.5f}")
    print("large-m limit of the cloner fidelity: 2/3")


if __name__ == "__main__":
    main()
