"""Closed-form Mellin transform against the numerically inverted density.

    python scripts/mellin_table.py
    python scripts/mellin_table.py --law 1.5,0.4 --s 1.2 1.8 2.2
"""
import argparse

from stablemech import stable_density as sd
from stablemech.errors import PoleError


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--law", action="append", help="alpha,rho (repeatable)")
    ap.add_argument("--s", type=float, nargs="+", default=[1.2, 1.5, 1.8])
    args = ap.parse_args()
    laws = [tuple(float(v) for v in x.split(",")) for x in args.law] if args.law else \
        [(2.0, 0.5), (1.0, 0.5), (0.5, 1.0)]

    print(f"{'alpha':>6} {'rho':>6} {'s':>5} {'closed form':>16} {'inverted':>16} {'|diff|':>9}")
    for alpha, rho in laws:
        spec = sd.MellinSpec(alpha, rho)
        for s in args.s:
            try:
                m = sd.mellin_value(spec, s).real
                num = sd.mellin_numeric(alpha, rho, s)
            except PoleError as exc:
                print(f"{alpha:>6} {rho:>6} {s:>5}  diverges ({exc})")
                continue
            print(f"{alpha:>6} {rho:>6} {s:>5} {m:>16.12f} {num:>16.12f} {abs(m - num):>9.1e}")


if __name__ == "__main__":
    main()
