"""KS distance of symmetric stable laws to their renormalized n-sums.

Sweeps alpha and the group size, reports KS / critical value per seed, and
a uniform-law control that is not a fixed point.

    python scripts/fixed_point_sweep.py --N 100000 --seeds 3
"""
import argparse
import time

import numpy as np

from stablemech import renorm_sampling as rs
from stablemech.renorm_sampling import EmpiricalDistribution
from stablemech.stable1d import StableLaw1D


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--N", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0])
    ap.add_argument("--groups", type=int, nargs="+", default=[2, 5, 10])
    ap.add_argument("--level", type=float, default=0.01)
    args = ap.parse_args()

    crit = rs.ks_critical_value(args.N, args.N, args.level)
    print(f"critical value {crit:.5f} (level {args.level}, N = {args.N})")
    start = time.perf_counter()
    for alpha in args.alphas:
        law = StableLaw1D(alpha, 0.5, 0.5) if alpha < 2 else StableLaw1D(2.0, variance=2.0)
        for n in args.groups:
            ratios = [rs.fixed_point_distance(law, n, args.N, seed=s) / crit for s in range(args.seeds)]
            passes = sum(r < 1 for r in ratios)
            print(f"alpha={alpha:<4} n={n:<3} KS/crit=" + " ".join(f"{r:.2f}" for r in ratios)
                  + f"  pass {passes}/{args.seeds}")
    for s in range(args.seeds):
        u = np.random.default_rng(s).uniform(-1.0, 1.0, 3 * args.N)
        ks = rs.fixed_point_distance_samples(EmpiricalDistribution(u[: args.N]),
                                             EmpiricalDistribution(u[args.N:]), 2, 2.0)
        print(f"uniform control seed={s} KS/crit={ks / crit:.2f}")
    print(f"elapsed {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
