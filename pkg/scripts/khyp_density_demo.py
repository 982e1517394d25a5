"""Random charges: eventual determinant signs and restricted k-hyponormality.

For each charge, prints the density signs, the certified sign thresholds,
and for every level k whether the restriction past the thresholds passes
the Hankel scan.  The pass/fail column should track the density signs.
"""

import argparse
import random
import sys
from fractions import Fraction as F

from shiftcharge import Charge, MomentSeq, sign_census
from shiftcharge.hankel import k_hyponormality_test, restriction_shift, sign_threshold


def random_charge(rng: random.Random) -> Charge:
    count = rng.randint(3, 5)
    positions = [F(1)]
    for _ in range(count - 1):
        positions.append(positions[-1] * F(rng.randint(1, 3), rng.randint(5, 6)))
    signs = [1] + [rng.choice((1, -1)) for _ in range(count - 1)]
    raw = [s * F(rng.randint(1, 9), rng.randint(1, 4)) for s in signs]
    total = sum(raw)
    if total <= 0:
        return random_charge(rng)
    return Charge.build(zip(positions, (x / total for x in raw)))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=8)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    agree = total = 0
    for _ in range(args.count):
        c = random_charge(rng)
        pattern = str(sign_census(c)[0])
        thresholds = [sign_threshold(c, j) for j in range(1, len(c) + 1)]
        print(f"densities {pattern:<12} n_star by size {thresholds}")
        for k in range(1, len(c)):
            I = max(thresholds[: k + 1])
            m = restriction_shift(MomentSeq.from_charge(c), I)
            passed = k_hyponormality_test(m, k, max(I + 10, 40), stop_early=True).passed
            predicted = all(a > 0 for a in c.densities[: k + 1])
            total += 1
            agree += passed == predicted
            print(f"    k={k}: restricted at I={I:<4} {'passes' if passed else 'fails '}  predicted {'pass' if predicted else 'fail'}")
    print(f"{agree}/{total} levels agree with the density prediction")
    return 0 if agree == total else 1


if __name__ == "__main__":
    sys.exit(main())
