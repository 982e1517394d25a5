"""Print computed density signs next to the expected template, per sector."""

import sys
from fractions import Fraction as F

from shiftcharge.cpd import find_cpd_weight_multipliers
from shiftcharge.errors import UnknownPattern
from shiftcharge.grws import GrwsParams, classify_sector, expected_sign_pattern, grws_charge
from shiftcharge.rational import fmt

DEPTH = 12

# one representative (N, D) per region, for p = 2
POINTS = [
    (F(-3, 5), F(-3, 10)),
    (F(-1, 2), F(1, 4)),
    (F(-1, 4), F(1, 2)),
    (F(1, 4), F(1, 2)),
    (F(1, 8), F(1, 2)),
    (F(1, 8), F(3, 8)),
    (F(1, 2), F(1, 4)),
    (F(1, 2), F(-1, 4)),
    (F(1, 4), F(-1, 2)),
    (F(-1, 2), F(-3, 4)),
    (F(-1, 5), F(-2, 5)),
    (F(-2, 5), F(-9, 10)),
    (F(-1, 10), F(-1, 2)),
]


def main(p=F(2)) -> int:
    print(f"p = {fmt(p)}, depth {DEPTH}")
    print(f"{'N':>6} {'D':>6}  {'sector':<8} {'computed':<14} {'expected':<14} multipliers")
    for N, D in POINTS:
        pt = GrwsParams(p, N, D)
        sector = classify_sector(pt)
        gc = grws_charge(pt, depth=DEPTH)
        computed = "".join(s.value for s in gc.sign_pattern())
        try:
            expected = "".join(s.value for s in expected_sign_pattern(sector).expand(DEPTH + 1))
        except UnknownPattern:
            expected = "?"
        cpd = find_cpd_weight_multipliers(gc.charge)
        label = sector.label() + (f" j={sector.special_line}" if sector.special_line else "")
        mults = ",".join(fmt(k) for k in cpd.multipliers) or cpd.status.value
        print(f"{fmt(N):>6} {fmt(D):>6}  {label:<8} {computed:<14} {expected:<14} {mults}")
    return 0


if __name__ == "__main__":
    sys.exit(main(F(sys.argv[1]) if len(sys.argv) > 1 else F(2)))
