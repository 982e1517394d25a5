"""Geometrically regular weighted shifts (GRWS).

Weights squared are (p^n + N)/(p^n + D) with p > 1 and (N, D) in the open
square (-1, 1)^2.  The representing charge sits on the atoms 1, 1/p, 1/p^2, ...
with densities a * c_i, where c_i is the running product of the multipliers

    m_0 = 1,   m_i = p (D - p^(i-1) N) / (p^i - 1),

and a = 1 / sum_i c_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .charge import Charge, Sign, SignPattern, TailBound
from .errors import DegenerateNormalizer, InvalidParams, TruncationTooDeep, UnknownPattern
from .rational import RationalLike, as_fraction
from .seqcalc import MomentSeq, WeightSeq, moments_from_weights

DEFAULT_EPSILON = Fraction(1, 10**12)
# exact coefficients grow by a few digits per atom; past this, pick a larger epsilon
MAX_AUTO_DEPTH = 400


@dataclass(frozen=True)
class GrwsParams:
    p: Fraction
    N: Fraction
    D: Fraction

    def __post_init__(self):
        for name in ("p", "N", "D"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.p <= 1:
            raise InvalidParams(f"p must exceed 1 (got {self.p})")
        if not (-1 < self.N < 1 and -1 < self.D < 1):
            raise InvalidParams(f"(N, D) = ({self.N}, {self.D}) is outside the open unit square")

    @classmethod
    def of(cls, p: RationalLike, N: RationalLike, D: RationalLike) -> "GrwsParams":
        return cls(as_fraction(p), as_fraction(N), as_fraction(D))


def grws_weight_sq(params: GrwsParams, n: int) -> Fraction:
    pn = params.p**n
    return (pn + params.N) / (pn + params.D)


def grws_weights(params: GrwsParams) -> WeightSeq:
    return WeightSeq(lambda n: grws_weight_sq(params, n))


def grws_moments(params: GrwsParams) -> MomentSeq:
    """Exact moments straight from the weights (no truncation involved)."""
    return moments_from_weights(grws_weights(params))


def grws_multiplier(params: GrwsParams, i: int) -> Fraction:
    if i < 0:
        raise ValueError("multiplier index must be nonnegative")
    if i == 0:
        return Fraction(1)
    p, N, D = params.p, params.N, params.D
    return p * (D - p ** (i - 1) * N) / (p**i - 1)


def grws_coefficients(params: GrwsParams, depth: int) -> list[Fraction]:
    """c_0..c_depth, c_i = c_{i-1} m_i."""
    out = [Fraction(1)]
    for i in range(1, depth + 1):
        out.append(out[-1] * grws_multiplier(params, i))
    return out


def _multiplier_envelope(params: GrwsParams, i: int) -> Fraction:
    """Upper bound on |m_l| valid for every l >= i (the bound decreases in l)."""
    p = params.p
    pi = p**i
    return (p * abs(params.D) + pi * abs(params.N)) / (pi - 1)


def _tail_bound(params: GrwsParams, c_last: Fraction, depth: int) -> Fraction:
    """Certified bound on sum_{i > depth} |c_i|.

    Coefficients are summed explicitly until the multiplier envelope drops
    below 1; the rest is a geometric series.
    """
    total = Fraction(0)
    c = c_last
    i = depth
    while c != 0:
        rho = _multiplier_envelope(params, i + 1)
        if rho < 1:
            return total + abs(c) * rho / (1 - rho)
        i += 1
        c *= grws_multiplier(params, i)
        total += abs(c)
    return total


@dataclass(frozen=True)
class GrwsCharge:
    """Truncated representing charge of a GRWS.

    ``charge`` has densities a_estimate * c_i at p^-i, i <= depth.  With
    automatic depth it is normalized exactly; at a fixed shallow depth the
    normalizer comes from the weight product, so the retained mass is only
    close to 1.  The true normalizer lies within ``a_error`` of
    ``a_estimate``; ``coefficient_tail`` bounds sum_{i > depth} |c_i|.
    """

    params: GrwsParams
    depth: int
    coefficients: tuple[Fraction, ...]
    charge: Charge
    a_estimate: Fraction
    a_error: Fraction
    coefficient_tail: Fraction

    @property
    def exact(self) -> bool:
        return self.coefficient_tail == 0

    def sign_pattern(self) -> SignPattern:
        """Signs of the densities at 1, 1/p, ..., 1/p^depth, zeros included."""
        return SignPattern(tuple(Sign.of(c) for c in self.coefficients))

    def moment_error(self, n: int) -> Fraction:
        """Bound on |gamma_n - moment(charge, n)| against the exact moments.

        Covers both the omitted atoms and the uncertainty in the normalizer.
        """
        retained = sum(
            (abs(c) * self.params.p ** (-i * n) for i, c in enumerate(self.coefficients)),
            Fraction(0),
        )
        a_hi = self.a_estimate + self.a_error
        omitted = a_hi * self.coefficient_tail * self.params.p ** (-(self.depth + 1) * n)
        return self.a_error * retained + omitted


def grws_charge(
    params: GrwsParams,
    epsilon: RationalLike = DEFAULT_EPSILON,
    depth: Optional[int] = None,
    min_depth: int = 0,
    max_depth: int = MAX_AUTO_DEPTH,
) -> GrwsCharge:
    """Truncate the representing charge with a certified tail.

    Without ``depth``, atoms are added until the geometric tail bound on the
    omitted coefficients drops below ``epsilon`` (and at least ``min_depth``
    atoms past the first are kept).  On a special line D = p^j N the charge
    is finite and returned exactly.  Automatic truncation gives up with
    TruncationTooDeep past ``max_depth`` (slow decay when |N| is near 1).
    """
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    coeffs = [Fraction(1)]
    i = 0
    while True:
        if depth is not None:
            if i >= depth:
                tail = _tail_bound(params, coeffs[-1], i)
                break
        elif coeffs[-1] == 0:
            tail = Fraction(0)
            break
        elif i >= min_depth:
            tail = _tail_bound(params, coeffs[-1], i)
            if tail < epsilon:
                break
            if i >= max_depth:
                raise TruncationTooDeep(
                    f"tail bound {float(tail):.3g} still above epsilon at depth {i}"
                )
        i += 1
        coeffs.append(coeffs[-1] * grws_multiplier(params, i))
    # drop the trailing zero coefficient found on special lines unless asked for
    if depth is None:
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
    depth_used = len(coeffs) - 1
    partial = sum(coeffs, Fraction(0))
    if tail < epsilon and not (partial - tail <= 0 <= partial + tail):
        a = 1 / partial
        a_err = Fraction(0) if tail == 0 else tail / (abs(partial) * (abs(partial) - tail))
    elif depth is not None:
        # shallow fixed depth: the normalizer does not depend on how many
        # atoms are kept, and the weight product converges at rate 1/p
        a, a_err = normalizer_enclosure(params, epsilon)
    else:
        raise DegenerateNormalizer(f"sum of c_n lies in [{partial - tail}, {partial + tail}]")
    truncation = None
    if tail > 0:
        a_hi = abs(a) + a_err
        truncation = TailBound(a_hi * tail, params.p ** (-(depth_used + 1)))
    charge = Charge.build(
        [(params.p ** (-i), a * c) for i, c in enumerate(coeffs)], truncation
    )
    return GrwsCharge(params, depth_used, tuple(coeffs), charge, a, a_err, tail)


def normalizer_product(params: GrwsParams, terms: int) -> Fraction:
    """Partial product prod_{j<terms} (p^j+N)/(p^j+D); its limit is a(N, D).

    gamma_n is this partial product, and gamma_n -> a * c_0 = a as n grows.
    """
    return math.prod((grws_weight_sq(params, j) for j in range(terms)), start=Fraction(1))


def normalizer_enclosure(params: GrwsParams, epsilon: RationalLike) -> tuple[Fraction, Fraction]:
    """(P_J, err) with |a - P_J| <= err < epsilon * P_J.

    The omitted factors are 1 + x_j with |x_j| <= |N - D|/(p^j - 1), so with
    S = sum_{j >= J} |x_j| < 1 the remainder lies in [1 - S, 1/(1 - S)].
    """
    epsilon = as_fraction(epsilon)
    p, gap = params.p, abs(params.N - params.D)
    J = 1
    while True:
        q = p ** (-J)
        S = gap * q / ((1 - 1 / p) * (1 - q))
        if S < 1 and S / (1 - S) < epsilon:
            break
        J += 1
    P = normalizer_product(params, J)
    return P, P * S / (1 - S)


# -- Magic Square sectors -----------------------------------------------------


class SectorTag(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"
    VIIIA = "VIIIA"
    VIIIB = "VIIIB"
    VIII = "VIII"  # third quadrant below D = p^2 N


class Boundary(str, Enum):
    ORIGIN = "origin"
    N_AXIS = "N_axis"  # D = 0
    D_AXIS = "D_axis"  # N = 0
    DIAGONAL = "diagonal"  # D = N
    ANTIDIAGONAL = "antidiagonal"  # D = -N


@dataclass(frozen=True)
class Sector:
    """Exact Magic Square location.

    ``tag`` is None on a boundary line.  ``special_line`` is j when D = p^j N
    exactly; ``band`` is j when p^j N < D < p^(j+1) N (N > 0 or N < 0 alike).
    """

    tag: Optional[SectorTag]
    boundary: Optional[Boundary] = None
    special_line: Optional[int] = None
    band: Optional[int] = None

    def label(self) -> str:
        if self.tag is None:
            return f"boundary:{self.boundary.value}"
        return self.tag.value


def _power_index(p: Fraction, ratio: Fraction) -> tuple[Optional[int], int]:
    """For ratio >= 1: (j, j) if ratio == p^j, else (None, j) with p^j < ratio < p^(j+1)."""
    j = 0
    pj = Fraction(1)
    while pj * p <= ratio:
        pj *= p
        j += 1
    return (j if pj == ratio else None), j


def classify_sector(params: GrwsParams) -> Sector:
    p, N, D = params.p, params.N, params.D
    if N == 0 and D == 0:
        return Sector(None, Boundary.ORIGIN)
    if N == 0:
        return Sector(None, Boundary.D_AXIS)
    if D == 0:
        return Sector(None, Boundary.N_AXIS)
    if D == N:
        return Sector(None, Boundary.DIAGONAL, special_line=0)
    if D == -N:
        return Sector(None, Boundary.ANTIDIAGONAL)

    same_sign = (N > 0) == (D > 0)
    special = band = None
    if same_sign and D / N > 1:
        special, band = _power_index(p, D / N)

    if N < 0 and D > 0:
        return Sector(SectorTag.III if D > -N else SectorTag.II)
    if N < 0 and D < 0:
        if D > N:
            return Sector(SectorTag.I)
        # D < N < 0: D/N > 1
        if special is not None:
            tag = SectorTag.VIIIB if special <= 2 else SectorTag.VIII
            return Sector(tag, special_line=special, band=special)
        if band == 0:
            return Sector(SectorTag.VIIIA, band=0)
        if band == 1:
            return Sector(SectorTag.VIIIB, band=1)
        return Sector(SectorTag.VIII, band=band)
    if N > 0 and D > 0:
        if D > N:
            return Sector(SectorTag.IV, special_line=special, band=band)
        return Sector(SectorTag.V)
    # N > 0, D < 0
    return Sector(SectorTag.VI if D > -N else SectorTag.VII)


@dataclass(frozen=True)
class SignTemplate:
    """A fixed prefix followed by a repeating cycle of signs."""

    prefix: tuple[Sign, ...]
    cycle: tuple[Sign, ...]

    def expand(self, length: int) -> SignPattern:
        out = list(self.prefix[:length])
        while len(out) < length:
            out.append(self.cycle[(len(out) - len(self.prefix)) % len(self.cycle)])
        return SignPattern(tuple(out))

    def __str__(self) -> str:
        head = ",".join(s.value for s in self.prefix)
        rep = ",".join(s.value for s in self.cycle)
        return f"{head},({rep})..." if head else f"({rep})..."


_P, _M, _Z = Sign.PLUS, Sign.MINUS, Sign.ZERO


def expected_sign_pattern(sector: Sector, k_hint: Optional[int] = None) -> SignTemplate:
    """Density-sign template along 1, 1/p, 1/p^2, ...

    ``k_hint`` overrides the band index j of a Sector IV subsector
    p^j N < D < p^(j+1) N, whose pattern is j+2 pluses then alternation.
    """
    tag = sector.tag
    if tag is None:
        if sector.boundary is Boundary.DIAGONAL:
            return SignTemplate((_P,), (_Z,))
        raise UnknownPattern(f"no density template on the {sector.boundary.value} boundary")
    if tag in (SectorTag.I, SectorTag.II, SectorTag.III):
        return SignTemplate((), (_P,))
    if tag is SectorTag.IV:
        if sector.special_line is not None and k_hint is None:
            return SignTemplate((_P,) * (sector.special_line + 1), (_Z,))
        j = k_hint if k_hint is not None else sector.band
        if j is None:
            raise UnknownPattern("Sector IV band index unknown")
        return SignTemplate((_P,) * (j + 2), (_M, _P))
    if tag is SectorTag.VIIIA:
        return SignTemplate((_P,), (_M,))
    if tag is SectorTag.VIIIB:
        if sector.special_line == 1:
            return SignTemplate((_P, _M), (_Z,))
        if sector.special_line == 2:
            return SignTemplate((_P, _M, _P), (_Z,))
        return SignTemplate((_P, _M), (_P,))
    raise UnknownPattern(f"Sector {tag.value}: densities mixed, no fixed template")
