"""Exact Hankel moment matrices, determinants and positivity verdicts.

``M_n^k`` is the k x k matrix with entries gamma_{n+i+j}.  A shift is
k-hyponormal when every (k+1) x (k+1) matrix ``M_m^{k+1}`` is positive
semidefinite; a finite scan over m can only ever report "to horizon".

For a finite atomic charge sum a_i delta_{r_i} (r_1 > r_2 > ...), Cauchy-Binet
gives

    det M_n^k = sum over k-subsets C of  prod_{j in C} a_j r_j^n * V(C)^2,

so the leading subset {1..k} wins for large n and fixes the sign as
sign(a_1 ... a_k).  :func:`dominance_threshold` computes an explicit index
past which that leading term provably dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .charge import Charge, Sign, TailBound
from .errors import TooFewAtoms, ZeroMoment
from .seqcalc import MomentSeq

Matrix = Sequence[Sequence[Fraction]]


@dataclass(frozen=True)
class HankelMatrix:
    base: int
    size: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]


def hankel_matrix(m: MomentSeq, n: int, size: int) -> HankelMatrix:
    if size < 1:
        raise ValueError("Hankel size must be at least 1")
    if n < 0:
        raise ValueError("base index must be nonnegative")
    vals = [m[n + t] for t in range(2 * size - 1)]
    entries = tuple(tuple(vals[i + j] for j in range(size)) for i in range(size))
    return HankelMatrix(n, size, entries)


def _rows(h) -> list[list[Fraction]]:
    if isinstance(h, HankelMatrix):
        return [list(r) for r in h.entries]
    return [[Fraction(x) for x in r] for r in h]


def _bareiss(a: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination on an integer matrix (in place)."""
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        piv = a[i][i]
        for r in range(i + 1, n):
            ari = a[r][i]
            row_r, row_i = a[r], a[i]
            for c in range(i + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_r[c] = (row_r[c] * piv - ari * row_i[c]) // prev
            row_r[i] = 0
        prev = piv
    return sign * a[n - 1][n - 1]


def exact_det(h) -> Fraction:
    """Exact determinant of a rational matrix via Bareiss elimination.

    Denominators are cleared once with a common multiple, so the elimination
    itself runs on Python integers.
    """
    rows = _rows(h)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)
    scale = math.lcm(*(x.denominator for r in rows for x in r))
    ints = [[x.numerator * (scale // x.denominator) for x in r] for r in rows]
    return Fraction(_bareiss(ints), scale**n)


def principal_minor(h, indices: Sequence[int]) -> Fraction:
    rows = _rows(h)
    return exact_det([[rows[i][j] for j in indices] for i in indices])


class PsdKind(str, Enum):
    PD = "PD"
    PSD_SINGULAR = "PSD_singular"
    NOT_PSD = "NotPSD"


@dataclass(frozen=True)
class PsdVerdict:
    kind: PsdKind
    witness_indices: Optional[tuple[int, ...]] = None
    witness_value: Optional[Fraction] = None

    @property
    def psd(self) -> bool:
        return self.kind is not PsdKind.NOT_PSD


def psd_test(h) -> PsdVerdict:
    """PD by leading minors (Sylvester); otherwise all 2^k - 1 principal minors.

    The witness of a NotPSD verdict is the first negative principal minor,
    scanning by size and then lexicographically.
    """
    rows = _rows(h)
    n = len(rows)
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ValueError("psd_test needs a symmetric matrix")
    if all(principal_minor(rows, range(s)) > 0 for s in range(1, n + 1)):
        return PsdVerdict(PsdKind.PD)
    for s in range(1, n + 1):
        for idx in combinations(range(n), s):
            value = principal_minor(rows, idx)
            if value < 0:
                return PsdVerdict(PsdKind.NOT_PSD, idx, value)
    return PsdVerdict(PsdKind.PSD_SINGULAR)


@dataclass(frozen=True)
class HankelReport:
    """Per-base verdicts for the (k+1) x (k+1) matrices, m = 0..m_range.

    A passing report only speaks for the tested range of m.
    """

    k: int
    m_range: int
    verdicts: tuple[PsdVerdict, ...]
    first_failure: Optional[int] = None

    @property
    def overall(self) -> PsdKind:
        kinds = {v.kind for v in self.verdicts}
        if PsdKind.NOT_PSD in kinds:
            return PsdKind.NOT_PSD
        if kinds == {PsdKind.PD}:
            return PsdKind.PD
        return PsdKind.PSD_SINGULAR

    @property
    def passed(self) -> bool:
        return self.first_failure is None


def k_hyponormality_test(
    m: MomentSeq, k: int, m_range: int, stop_early: bool = False
) -> HankelReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    if m_range < 0:
        raise ValueError("m_range must be nonnegative")
    verdicts = []
    first = None
    for base in range(m_range + 1):
        v = psd_test(hankel_matrix(m, base, k + 1))
        verdicts.append(v)
        if first is None and v.kind is PsdKind.NOT_PSD:
            first = base
            if stop_early:
                break
    return HankelReport(k, m_range, tuple(verdicts), first)


def restriction_shift(m: MomentSeq, I: int) -> MomentSeq:
    """Moments of the restriction to span{e_i : i >= I}: gamma_{n+I}/gamma_I."""
    g = m[I]
    if g == 0:
        raise ZeroMoment(I)
    return MomentSeq(lambda n: m[n + I] / g, None if m.known_length is None else m.known_length - I)


def restrict_charge(c: Charge, I: int) -> Charge:
    """Charge of the restricted shift: densities a_i r_i^I, renormalized."""
    tilted = Charge.build([(a.position, a.density * a.position**I) for a in c.atoms])
    g = tilted.total_mass
    if g == 0:
        raise ZeroMoment(I)
    tail = None
    if c.truncation is not None:
        t = c.truncation
        tail = TailBound(t.mass * t.position**I / abs(g), t.position)
    return Charge(tilted.scaled(1 / g).atoms, tail)


def asymptotic_k_det_sign(c: Charge, k: int) -> Sign:
    """Sign that det M_n^k takes for all large n: sign(a_1 ... a_k).

    With fewer than k atoms the k x k determinants vanish identically.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(c) < k:
        if c.truncation is not None and c.truncation.mass > 0:
            raise TooFewAtoms(f"only {len(c)} retained atoms; sign of size-{k} determinants unknown")
        return Sign.ZERO
    return Sign.of(math.prod(c.densities[:k]))


@dataclass(frozen=True)
class DominanceBound:
    """Explicit threshold past which the leading Cauchy-Binet term wins.

    ``B`` = max |a_j|, ``s`` = sum |a_j| (tail mass included), ``L`` = the
    positive constant of the leading subset (det of the k x k Hankel matrix
    of sum_{i<=k} delta_{r_i} at n = 0).  For n >= ``n_star``

        |a_1..a_k| (r_1..r_k)^n L  >  one_small(n) + multi_small(n).
    """

    k: int
    B: Fraction
    s: Fraction
    L: Fraction
    n_star: int
    coeff_one: Fraction = field(repr=False)
    ratio_one: Fraction = field(repr=False)
    coeff_multi: Fraction = field(repr=False)
    ratio_multi: Fraction = field(repr=False)

    def relative_error(self, n: int) -> Fraction:
        """(one_small + multi_small) / leading term, at index n."""
        return self.coeff_one * self.ratio_one**n + self.coeff_multi * self.ratio_multi**n


def dominance_threshold(c: Charge, k: int) -> DominanceBound:
    """Smallest n_star with leading term > both tail bounds for all n >= n_star.

    Bounds, with K = k! max(1, r_1)^(k(2k-2)) bounding every V(C)^2:

      one index beyond k:   k s B^(k-1) (r_1..r_{k-1} r_{k+1})^n K
      two or more beyond k: (s^k / k!) (r_1..r_{k-2} r_{k+1} r_{k+2})^n K

    Both shrink geometrically relative to the leading term, so the relative
    error is decreasing in n and the first n where it drops below 1 is n_star.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    r = list(c.positions)
    a = list(c.densities)
    tail = c.truncation
    has_tail = tail is not None and tail.mass > 0
    if len(r) < k or (len(r) == k and not has_tail):
        raise TooFewAtoms(f"dominance bound needs more than {k} atoms (have {len(r)})")

    def beyond(i: int) -> Optional[Fraction]:
        # position of the i-th atom (0-based) past the leading block, or tail bound
        if i < len(r):
            return r[i]
        return tail.position if has_tail else None

    t_mass = tail.mass if has_tail else Fraction(0)
    s = sum((abs(x) for x in a), Fraction(0)) + t_mass
    B = max([abs(x) for x in a] + [t_mass])
    lead = [(pos, 1) for pos in r[:k]]
    unit_moments = MomentSeq.from_charge(Charge.build(lead))
    L = exact_det(hankel_matrix(unit_moments, 0, k))
    K = math.factorial(k) * max(Fraction(1), r[0]) ** (k * (2 * k - 2))
    lead_coeff = abs(math.prod(a[:k])) * L

    r_next = beyond(k)
    coeff_one = k * s * B ** (k - 1) * K / lead_coeff
    ratio_one = r_next / r[k - 1]

    coeff_multi = Fraction(0)
    ratio_multi = Fraction(0)
    r_next2 = beyond(k + 1)
    if k >= 2 and r_next2 is not None:
        coeff_multi = s**k * K / (math.factorial(k) * lead_coeff)
        ratio_multi = r_next * r_next2 / (r[k - 2] * r[k - 1])

    def err(n: int) -> Fraction:
        return coeff_one * ratio_one**n + coeff_multi * ratio_multi**n

    # err is nonincreasing in n: gallop, then bisect
    hi = 1
    while err(hi) >= 1:
        hi *= 2
    lo = 0
    if err(0) < 1:
        n_star = 0
    else:
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if err(mid) < 1:
                hi = mid
            else:
                lo = mid
        n_star = hi
    return DominanceBound(k, B, s, L, n_star, coeff_one, ratio_one, coeff_multi, ratio_multi)


def sign_threshold(c: Charge, k: int) -> int:
    """Index from which sign(det M_n^k) is certified for a finite charge.

    With exactly k atoms the determinant *is* the leading term, so 0.
    """
    if c.is_finite and len(c) <= k:
        return 0
    return dominance_threshold(c, k).n_star


class Certificate(str, Enum):
    ALL_M = "all_m"
    EVENTUALLY_FAILS = "eventually_fails"
    HORIZON_ONLY = "horizon_only"


@dataclass(frozen=True)
class KHypCertificate:
    report: HankelReport
    signs: tuple[Sign, ...]
    thresholds: tuple[Optional[int], ...]
    certificate: Certificate
    note: str = ""


def certify_k_hyponormality(c: Charge, k: int, m_range: int) -> KHypCertificate:
    """Finite scan plus asymptotic determinant signs for sizes 1..k+1.

    For a finite charge with every leading sign positive, the scan over
    m < max n_star and the dominance bound for m >= max n_star together cover
    all m.  A negative leading sign of size j <= k+1 means M_m^{k+1} has a
    negative leading minor for all large m.
    """
    report = k_hyponormality_test(MomentSeq.from_charge(c), k, m_range)
    signs: list[Sign] = []
    thresholds: list[Optional[int]] = []
    for j in range(1, k + 2):
        try:
            signs.append(asymptotic_k_det_sign(c, j))
        except TooFewAtoms:
            signs.append(Sign.ZERO)
        if len(c) >= j:
            thresholds.append(sign_threshold(c, j))
        else:
            thresholds.append(None)
    if not c.is_finite:
        return KHypCertificate(
            report, tuple(signs), tuple(thresholds), Certificate.HORIZON_ONLY,
            "truncated charge: signs and bounds refer to retained atoms",
        )
    if Sign.MINUS in signs:
        j = signs.index(Sign.MINUS) + 1
        return KHypCertificate(
            report, tuple(signs), tuple(thresholds), Certificate.EVENTUALLY_FAILS,
            f"det M_n^{j} < 0 for all n >= {thresholds[j - 1]}",
        )
    if all(s is Sign.PLUS for s in signs) and report.passed:
        needed = max(t for t in thresholds if t is not None)
        if m_range >= needed - 1:
            return KHypCertificate(
                report, tuple(signs), tuple(thresholds), Certificate.ALL_M,
                f"scan covers m < {needed}; leading minors positive for m >= {needed}",
            )
    return KHypCertificate(report, tuple(signs), tuple(thresholds), Certificate.HORIZON_ONLY)
