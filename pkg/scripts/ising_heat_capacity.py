"""Ising branch: zero-field heat capacity against ln(1/t) and the regressed exponents.

    python scripts/ising_heat_capacity.py --csv ising.csv
"""
import argparse
import csv
import math

import numpy as np

from stablemech import scaling_theory as stt


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--c", type=float, default=1.0, help="coefficient of t^2 ln|t|")
    ap.add_argument("--csv", help="write t, C, C/ln(1/t) to this file")
    args = ap.parse_args()

    ev = stt.PhiEvaluator.ising_model(stt.IsingConstants(c=args.c))
    ts = np.logspace(-1, -6, 11)
    rows = []
    for t in ts:
        C = stt.thermo_derivatives(ev, t, 0.0)["C"]
        rows.append((t, C, C / math.log(1 / t)))
        print(f"t={t:.1e}  C={C:.8f}  C/ln(1/t)={rows[-1][2]:.8f}")

    tb = np.logspace(-1, -3, 9)
    beta = stt.log_slope(tb, [stt.thermo_derivatives(ev, -t, 0.0)["eta"] for t in tb])
    hs = np.logspace(-1, -4, 9)
    inv_delta = stt.log_slope(hs, [stt.thermo_derivatives(ev, 0.0, h)["eta"] for h in hs])
    print(f"beta = {beta:.5f} (1/8), delta = {1 / inv_delta:.4f} (15)")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "C", "C_over_log"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
