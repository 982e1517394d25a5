"""Completely hyperexpansive shifts with atomic charge representations.

For a positive atomic sigma on [0, 1), the charge C delta_1 - sigma with
C = 1 + sigma([0, 1)) has completely alternating moments and Levy-Khinchin
data (a, b, nu) = (1, 0, sigma).  Conversely, a CHE sequence whose first
differences have the (scaled) moments  c * mu  admits such a charge iff
integral 1/(1-x) dmu < inf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .charge import Charge, delta_transform
from .errors import AtomAtOne, InvalidCharge, NotIntegrable, WrongShape
from .rational import RationalLike, as_fraction
from .seqcalc import MomentSeq

LK_CHECK_HORIZON = 16


def _require_positive_on_unit(mu: Charge, what: str, allow_one: bool) -> None:
    for atom in mu.atoms:
        if atom.density <= 0:
            raise InvalidCharge(f"{what} must have positive densities")
        if atom.position > 1 or (atom.position == 1 and not allow_one):
            if atom.position == 1:
                raise AtomAtOne(f"{what} has an atom at 1")
            raise InvalidCharge(f"{what} has an atom at {atom.position} outside [0, 1]")


@dataclass(frozen=True)
class LevyKhinchinData:
    """gamma_n = a + b n + sum_i nu_i (1 - x_i^n)."""

    a: Fraction
    b: Fraction
    nu: Charge

    def moment(self, n: int) -> Fraction:
        return (
            self.a
            + self.b * n
            + sum((atom.density * (1 - atom.position**n) for atom in self.nu), Fraction(0))
        )


@dataclass(frozen=True)
class DeltaMeasure:
    """First differences of a CHE sequence: Delta gamma_n = c * int x^n dmu."""

    c: Fraction
    mu: Charge

    def __post_init__(self):
        object.__setattr__(self, "c", as_fraction(self.c))
        if self.c <= 0:
            raise ValueError("scale c must be positive")
        _require_positive_on_unit(self.mu, "mu", allow_one=True)


def che_charge_from_sigma(sigma: Charge) -> Charge:
    """C delta_1 - sigma with C = 1 + sigma([0, 1)); total mass is 1."""
    _require_positive_on_unit(sigma, "sigma", allow_one=False)
    C = 1 + sigma.total_mass
    return Charge.point(1, C) - sigma


def levy_khinchin_of_charge(ch: Charge, horizon: int = LK_CHECK_HORIZON) -> LevyKhinchinData:
    """Read (a, b, nu) = (1, 0, sigma) off a charge C delta_1 - sigma.

    The identity gamma_n = 1 + sum sigma_i (1 - x_i^n) is re-checked exactly
    for n <= horizon.
    """
    if not ch.is_finite:
        raise WrongShape("Levy-Khinchin extraction needs a finite charge")
    if ch.total_mass != 1:
        raise WrongShape(f"total mass {ch.total_mass} != 1")
    sigma_pairs = []
    for atom in ch.atoms:
        if atom.position == 1:
            if atom.density <= 0:
                raise WrongShape("density at 1 must be positive")
        elif atom.position < 1 and atom.density < 0:
            sigma_pairs.append((atom.position, -atom.density))
        else:
            raise WrongShape(
                f"atom ({atom.position}, {atom.density}) is not part of C delta_1 - sigma"
            )
    if ch.atoms and ch.atoms[0].position != 1:
        raise WrongShape("no positive atom at 1")
    data = LevyKhinchinData(Fraction(1), Fraction(0), Charge.build(sigma_pairs))
    for n in range(horizon + 1):
        if data.moment(n) != ch.moment(n):
            raise WrongShape(f"Levy-Khinchin identity fails at n={n}")  # pragma: no cover
    return data


@dataclass(frozen=True)
class IntegrabilityVerdict:
    """Value of int 1/(1-x) dmu, or ``finite=False`` if mu has an atom at 1.

    ``error`` bounds the contribution of truncated atoms (None: unbounded,
    i.e. the tail may reach 1).
    """

    finite: bool
    value: Optional[Fraction] = None
    error: Optional[Fraction] = Fraction(0)


def integrability_test(dm: DeltaMeasure) -> IntegrabilityVerdict:
    mu = dm.mu
    if any(atom.position == 1 for atom in mu.atoms):
        return IntegrabilityVerdict(False, None, None)
    value = sum((atom.density / (1 - atom.position) for atom in mu.atoms), Fraction(0))
    err: Optional[Fraction] = Fraction(0)
    if mu.truncation is not None:
        t = mu.truncation
        err = t.mass / (1 - t.position) if t.position < 1 else None
    return IntegrabilityVerdict(True, value, err)


def charge_from_delta_measure(dm: DeltaMeasure) -> Charge:
    """[1 + c I] delta_1 - sum c a_i / (1 - x_i) delta_{x_i},  I = int dmu/(1-x)."""
    verdict = integrability_test(dm)
    if not verdict.finite:
        raise NotIntegrable("mu has an atom at 1: int 1/(1-x) dmu diverges")
    if not dm.mu.is_finite:
        raise NotIntegrable("truncated mu: the charge would only be approximate")
    pairs = [(1, 1 + dm.c * verdict.value)]
    pairs += [(a.position, -dm.c * a.density / (1 - a.position)) for a in dm.mu.atoms]
    return Charge.build(pairs)


def delta_measure_of_charge(ch: Charge) -> DeltaMeasure:
    """Split the first-difference charge of ``ch`` into scale c and probability mu.

    Requires Delta gamma to be represented by a positive charge on [0, 1]
    (true for every C delta_1 - sigma).  The zero case (ch = delta_1) uses
    c = 1 and empty mu.
    """
    d = delta_transform(ch)
    if any(a.density < 0 or a.position > 1 for a in d.atoms):
        raise WrongShape("first differences are not a positive measure on [0, 1]")
    mass = d.total_mass
    if mass == 0:
        return DeltaMeasure(Fraction(1), d)
    return DeltaMeasure(mass, d.scaled(1 / mass))


def q_poly(n: int, x: RationalLike) -> Fraction:
    """Q_n(x) = (x^n - 1 - n(x - 1)) / (x - 1)^2, with Q_n(1) = n(n-1)/2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = as_fraction(x)
    if x == 1:
        return Fraction(n * (n - 1), 2)
    return (x**n - 1 - n * (x - 1)) / (x - 1) ** 2


def q_poly_expanded(n: int, x: RationalLike) -> Fraction:
    """Polynomial form sum_{j=0}^{n-2} (n-1-j) x^j of Q_n."""
    x = as_fraction(x)
    return sum(((n - 1 - j) * x**j for j in range(n - 1)), Fraction(0))


@dataclass(frozen=True)
class CpdLikeRepresentation:
    """gamma_n = 1 + drift * n + sum_i Q_n(x_i) * w_i over the signed charge
    w = (x - 1) c mu, whose densities are all negative."""

    drift: Fraction
    signed_charge: Charge
    moments: MomentSeq

    def moment(self, n: int) -> Fraction:
        return (
            1
            + self.drift * n
            + sum((q_poly(n, a.position) * a.density for a in self.signed_charge), Fraction(0))
        )


def cpd_like_representation(
    dm: DeltaMeasure, b: RationalLike = 0, horizon: int = LK_CHECK_HORIZON
) -> CpdLikeRepresentation:
    """Rewrite gamma_n = 1 + b n + c sum_i a_i (1 - x_i^n)/(1 - x_i).

    The drift of the rewritten form is b + c mu([0, 1)).  Both forms, and the
    second differences against the moments of the signed charge, are checked
    exactly for n <= horizon.
    """
    b = as_fraction(b)
    if b < 0:
        raise ValueError("b must be nonnegative")
    if any(a.position >= 1 for a in dm.mu.atoms):
        raise InvalidCharge("mu must live on [0, 1); pass the mass at 1 as b")
    c = dm.c

    def direct(n: int) -> Fraction:
        return (
            1
            + b * n
            + c * sum((a.density * (1 - a.position**n) / (1 - a.position) for a in dm.mu), Fraction(0))
        )

    signed = Charge.build([(a.position, (a.position - 1) * c * a.density) for a in dm.mu])
    rep = CpdLikeRepresentation(b + c * dm.mu.total_mass, signed, MomentSeq(direct))
    for n in range(horizon + 1):
        if rep.moment(n) != direct(n):
            raise ArithmeticError(f"representations disagree at n={n}")  # pragma: no cover
        second = direct(n + 2) - 2 * direct(n + 1) + direct(n)
        if second != signed.moment(n):
            raise ArithmeticError(f"second difference mismatch at n={n}")  # pragma: no cover
    return rep
