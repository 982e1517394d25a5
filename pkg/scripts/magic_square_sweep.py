"""Classify a grid over the Magic Square and write the rows as CSV.

    python3 scripts/magic_square_sweep.py --p 2 --steps 21 --out results/square_p2.csv

Prints a per-sector tally.  SHIFTCHARGE_THREADS caps the worker count.
"""

import argparse
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path

from shiftcharge.rational import as_fraction
from shiftcharge.sweep import SweepSpec, sweep_rows, write_csv


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="2")
    ap.add_argument("--steps", type=int, default=11, help="grid points per axis")
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--khyp-max", type=int, default=2)
    ap.add_argument("--horizon", type=int, default=8)
    ap.add_argument("--out", type=Path, default=Path("results/magic_square.csv"))
    args = ap.parse_args(argv)

    # stay off the edges of the open square
    edge = Fraction(args.steps - 1, args.steps + 1)
    spec = SweepSpec(
        as_fraction(args.p),
        (-edge, edge, args.steps),
        (-edge, edge, args.steps),
        depth=args.depth,
        khyp_max=args.khyp_max,
        horizon=args.horizon,
    )
    rows = sweep_rows(spec)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="", encoding="utf-8") as fh:
        write_csv(rows, fh)

    tally = Counter(r["sector"] for r in rows)
    for sector, count in sorted(tally.items()):
        levels = Counter(r["khyp_level"] for r in rows if r["sector"] == sector)
        print(f"{sector:>24}  {count:4d} points  k-hyp levels {dict(sorted(levels.items()))}")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
