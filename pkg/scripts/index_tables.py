"""Print the critical-exponent table for every preset plus any extra (a1, a2, d) triples.

    python scripts/index_tables.py
    python scripts/index_tables.py --extra 2,11/10,3 --extra 1.9,1.25,3
"""
import argparse

from stablemech import scaling_theory as stt
from stablemech.scaling_theory import INDEX_NAMES


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--extra", action="append", default=[], help="a1,a2,d (P/Q and inf accepted)")
    args = ap.parse_args()

    rows = [(name, stt.preset_indexes(name)) for name in stt.PRESETS]
    for spec in args.extra:
        a1, a2, d = spec.split(",")
        rows.append((spec, stt.critical_indexes(a1, a2, d)))

    print(f"{'set':>14} " + " ".join(f"{k:>8}" for k in INDEX_NAMES))
    for label, idx in rows:
        cells = []
        for v in idx.as_tuple():
            cells.append(f"{str(v) if idx.exact else f'{v:.4f}':>8}")
        print(f"{label:>14} " + " ".join(cells))


if __name__ == "__main__":
    main()
