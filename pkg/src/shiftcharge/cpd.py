"""Weight multipliers that make a shift CPD-weights.

Multiplying the weights by sqrt(k) moves every atom r to k r; taking second
differences then reweights each atom by (1 - k r)^2.  A density keeps its
sign unless k = 1/r, when it vanishes.  So a multiplier works exactly when it
kills every atom of the minority sign, which forces the minority to be a
single atom (or, with one atom of each sign, either one).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .charge import (
    Charge,
    Sign,
    SubnormalVerdict,
    delta2_transform,
    is_subnormal_charge,
    scale_positions,
    sign_census,
)
from .errors import EmptyCharge, NonpositiveRatio, ZeroMoment
from .hankel import k_hyponormality_test
from .rational import RationalLike
from .seqcalc import (
    DEFAULT_DEPTH,
    DEFAULT_HORIZON,
    MomentSeq,
    completely_monotone_check,
    delta_pow,
    weights_from_moments,
)


def scaled_delta2_charge(c: Charge, k: RationalLike) -> Charge:
    """Charge of Delta^2 applied to the moments k^n gamma_n."""
    return delta2_transform(scale_positions(c, k))


class CpdStatus(str, Enum):
    ALREADY_SUBNORMAL = "AlreadySubnormal"
    MULTIPLIERS = "Multipliers"
    NO_MULTIPLIER = "NoMultiplier"


@dataclass(frozen=True)
class CpdVerdict:
    """``multipliers`` are the k values; the weight multipliers are sqrt(k).

    ``complete`` is False for truncated charges: an atom hidden in the tail
    could change the sign census.
    """

    status: CpdStatus
    multipliers: tuple[Fraction, ...] = ()
    evidence: dict = field(default_factory=dict, compare=False)
    complete: bool = True


def _one_signed(c: Charge) -> bool:
    return not c.atoms or is_subnormal_charge(c) is SubnormalVerdict.SUBNORMAL


def find_cpd_weight_multipliers(c: Charge) -> CpdVerdict:
    if not c.atoms:
        raise EmptyCharge("multiplier search needs at least one atom")
    _, n_plus, n_minus = sign_census(c)
    complete = c.is_finite
    if n_plus == 0 or n_minus == 0:
        return CpdVerdict(CpdStatus.ALREADY_SUBNORMAL, complete=complete)
    if n_plus == 1 and n_minus == 1:
        targets = list(c.atoms)
    elif n_plus == 1 or n_minus == 1:
        odd = Sign.PLUS if n_plus == 1 else Sign.MINUS
        targets = [a for a in c.atoms if Sign.of(a.density) is odd]
    else:
        return CpdVerdict(CpdStatus.NO_MULTIPLIER, complete=complete)
    # an atom at 0 is never moved onto 1
    candidates = [1 / a.position for a in targets if a.position != 0]
    evidence = {}
    accepted = []
    for k in sorted(candidates):
        transformed = scaled_delta2_charge(c, k)
        if _one_signed(transformed):
            accepted.append(k)
            evidence[k] = transformed
    if not accepted:
        return CpdVerdict(CpdStatus.NO_MULTIPLIER, complete=complete)
    return CpdVerdict(CpdStatus.MULTIPLIERS, tuple(accepted), evidence, complete)


class CpdWeightsKind(str, Enum):
    CPD_WEIGHTS = "CpdWeights"
    NOT_CPD_WEIGHTS = "NotCpdWeights"


@dataclass(frozen=True)
class CpdWeightsVerdict:
    """Horizon-qualified verdict on whether Delta^2 gamma gives subnormal weights.

    ``evidence`` names the check that decided: "zero" (affine gamma),
    "completely_monotone" (contractive Hausdorff evidence), "hankel"
    (Stieltjes-type Hankel positivity), or the failing check.
    """

    kind: CpdWeightsKind
    horizon: int
    depth: int
    evidence: str
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.kind is CpdWeightsKind.CPD_WEIGHTS


def is_cpd_weights(
    m: MomentSeq,
    horizon: int = DEFAULT_HORIZON,
    depth: int = DEFAULT_DEPTH,
    hankel_k: int = 2,
) -> CpdWeightsVerdict:
    """Do the second differences of ``m`` produce subnormal weights?

    Weights come from ratios, so Delta^2 gamma and -Delta^2 gamma are
    equivalent; the sequence is normalized by its first term.  Complete
    monotonicity to (depth, horizon) decides in the contractive case; if it
    fails, Hankel positivity (sizes up to hankel_k + 1, bases up to horizon)
    decides, which admits non-contractive subnormal weights.
    """
    d2 = delta_pow(m, 2)
    values = d2.prefix(horizon + depth + 2 * hankel_k + 2)
    if all(v == 0 for v in values):
        return CpdWeightsVerdict(CpdWeightsKind.CPD_WEIGHTS, horizon, depth, "zero")
    try:
        weights_from_moments(d2, horizon + 1)
    except (NonpositiveRatio, ZeroMoment) as exc:
        return CpdWeightsVerdict(
            CpdWeightsKind.NOT_CPD_WEIGHTS, horizon, depth, "ratio", (type(exc).__name__, exc.n)
        )
    t = MomentSeq.from_values([v / values[0] for v in values])
    cm = completely_monotone_check(t, depth, horizon)
    if cm.passed:
        return CpdWeightsVerdict(CpdWeightsKind.CPD_WEIGHTS, horizon, depth, "completely_monotone")
    for k in range(1, hankel_k + 1):
        report = k_hyponormality_test(t, k, horizon, stop_early=True)
        if not report.passed:
            v = report.verdicts[report.first_failure]
            return CpdWeightsVerdict(
                CpdWeightsKind.NOT_CPD_WEIGHTS, horizon, depth, "hankel",
                (k, report.first_failure, v.witness_indices, v.witness_value),
            )
    return CpdWeightsVerdict(CpdWeightsKind.CPD_WEIGHTS, horizon, depth, "hankel")
