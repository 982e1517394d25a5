"""Finite atomic signed measures ("Berger-type charges") on [0, inf).

A charge is a finite list of atoms ``a_i * delta_{r_i}`` kept in canonical
form: positions strictly decreasing, coincident atoms merged, zero densities
dropped.  A charge may stand in for the truncation of a countably atomic
charge; the omitted part is then summarized by a :class:`TailBound`.

Everything here is exact (``fractions.Fraction``).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import EmptyCharge, InvalidCharge
from .rational import RationalLike, as_fraction, fmt


class Sign(str, Enum):
    PLUS = "+"
    MINUS = "-"
    ZERO = "0"

    @classmethod
    def of(cls, x) -> "Sign":
        if x > 0:
            return cls.PLUS
        if x < 0:
            return cls.MINUS
        return cls.ZERO

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SignPattern:
    """Density signs read along decreasing atom positions (1, 1/p, 1/p^2, ...)."""

    signs: tuple[Sign, ...]

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self) -> Iterator[Sign]:
        return iter(self.signs)

    def __getitem__(self, i):
        return self.signs[i]

    def __str__(self) -> str:
        return ",".join(s.value for s in self.signs)

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        return cls(tuple(Sign(t) for t in text.replace(" ", "").split(",") if t))


@dataclass(frozen=True)
class Atom:
    position: Fraction
    density: Fraction


@dataclass(frozen=True)
class TailBound:
    """Summary of the atoms dropped by a truncation.

    ``mass`` bounds the sum of |omitted densities|; ``position`` bounds every
    omitted atom position from above.
    """

    mass: Fraction
    position: Fraction

    def __post_init__(self):
        if self.mass < 0:
            raise InvalidCharge("tail mass bound must be nonnegative")
        if self.position < 0:
            raise InvalidCharge("tail position bound must be nonnegative")


@dataclass(frozen=True)
class Charge:
    atoms: tuple[Atom, ...] = ()
    truncation: Optional[TailBound] = None

    def __post_init__(self):
        prev = None
        for atom in self.atoms:
            if atom.position < 0:
                raise InvalidCharge(f"negative atom position {atom.position}")
            if atom.density == 0:
                raise InvalidCharge("zero-density atoms must be removed")
            if prev is not None and atom.position >= prev:
                raise InvalidCharge("atom positions must be strictly decreasing")
            prev = atom.position

    @classmethod
    def build(
        cls,
        pairs: Iterable[tuple[RationalLike, RationalLike]],
        truncation: Optional[TailBound] = None,
    ) -> "Charge":
        """Canonicalize ``(position, density)`` pairs: merge, drop zeros, sort."""
        merged: dict[Fraction, Fraction] = defaultdict(Fraction)
        for pos, den in pairs:
            merged[as_fraction(pos)] += as_fraction(den)
        atoms = tuple(
            Atom(pos, den)
            for pos, den in sorted(merged.items(), key=lambda kv: kv[0], reverse=True)
            if den != 0
        )
        return cls(atoms, truncation)

    @classmethod
    def point(cls, position: RationalLike, density: RationalLike = 1) -> "Charge":
        return cls.build([(position, density)])

    @property
    def positions(self) -> tuple[Fraction, ...]:
        return tuple(a.position for a in self.atoms)

    @property
    def densities(self) -> tuple[Fraction, ...]:
        return tuple(a.density for a in self.atoms)

    @property
    def total_mass(self) -> Fraction:
        return sum(self.densities, Fraction(0))

    @property
    def abs_mass(self) -> Fraction:
        return sum((abs(d) for d in self.densities), Fraction(0))

    @property
    def normalized(self) -> bool:
        return self.total_mass == 1

    @property
    def is_finite(self) -> bool:
        return self.truncation is None

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __add__(self, other: "Charge") -> "Charge":
        return Charge.build(
            [(a.position, a.density) for a in self.atoms + other.atoms],
            _sum_tails(self.truncation, other.truncation),
        )

    def __neg__(self) -> "Charge":
        return self.scaled(-1)

    def __sub__(self, other: "Charge") -> "Charge":
        return self + (-other)

    def scaled(self, factor: RationalLike) -> "Charge":
        """Multiply every density by ``factor``."""
        factor = as_fraction(factor)
        tail = self.truncation
        if tail is not None:
            tail = TailBound(tail.mass * abs(factor), tail.position)
        return Charge.build([(a.position, a.density * factor) for a in self.atoms], tail)

    def moment(self, n: int) -> Fraction:
        return moment(self, n)

    def __repr__(self) -> str:
        body = " + ".join(f"({a.density})d[{a.position}]" for a in self.atoms) or "0"
        if self.truncation is not None:
            body += f" + tail(|mass|<={self.truncation.mass}, pos<={self.truncation.position})"
        return f"Charge({body})"

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "atoms": [{"pos": fmt(a.position), "den": fmt(a.density)} for a in self.atoms],
            "normalized": self.normalized,
        }
        if self.truncation is not None:
            out["tail"] = {"mass": fmt(self.truncation.mass), "pos": fmt(self.truncation.position)}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Charge":
        try:
            pairs = [(a["pos"], a["den"]) for a in data["atoms"]]
        except (KeyError, TypeError) as exc:
            raise InvalidCharge(f"malformed charge JSON: {exc}") from None
        tail = None
        if data.get("tail") is not None:
            tail = TailBound(as_fraction(data["tail"]["mass"]), as_fraction(data["tail"]["pos"]))
        charge = cls.build(pairs, tail)
        flag = data.get("normalized")
        if flag is not None and bool(flag) != charge.normalized:
            raise InvalidCharge("'normalized' flag disagrees with the total mass")
        return charge


def _sum_tails(t1: Optional[TailBound], t2: Optional[TailBound]) -> Optional[TailBound]:
    if t1 is None:
        return t2
    if t2 is None:
        return t1
    return TailBound(t1.mass + t2.mass, max(t1.position, t2.position))


def moment(c: Charge, n: int) -> Fraction:
    """sum_i a_i r_i^n, with 0^0 = 1."""
    if n < 0:
        raise ValueError("moment index must be nonnegative")
    return sum((a.density * a.position**n for a in c.atoms), Fraction(0))


def moment_error(c: Charge, n: int) -> Fraction:
    """Bound on |true moment - moment(c, n)| due to truncated atoms."""
    if c.truncation is None:
        return Fraction(0)
    return c.truncation.mass * c.truncation.position**n


def convolve(c1: Charge, c2: Charge) -> Charge:
    """Multiplicative convolution: delta_a * delta_b = delta_{ab}."""
    pairs = [
        (a.position * b.position, a.density * b.density) for a in c1.atoms for b in c2.atoms
    ]
    return Charge.build(pairs, _convolve_tails(c1, c2))


def _convolve_tails(c1: Charge, c2: Charge) -> Optional[TailBound]:
    t1, t2 = c1.truncation, c2.truncation
    if t1 is None and t2 is None:
        return None
    m1, m2 = c1.abs_mass, c2.abs_mass
    q1 = t1.mass if t1 else Fraction(0)
    q2 = t2.mass if t2 else Fraction(0)
    # largest position any omitted product can reach
    top1 = max(c1.positions[:1] + ((t1.position,) if t1 else ()), default=Fraction(0))
    top2 = max(c2.positions[:1] + ((t2.position,) if t2 else ()), default=Fraction(0))
    reach = Fraction(0)
    if t1:
        reach = max(reach, t1.position * top2)
    if t2:
        reach = max(reach, t2.position * top1)
    return TailBound(q1 * m2 + q2 * m1 + q1 * q2, reach)


def scale_positions(c: Charge, k: RationalLike) -> Charge:
    """Move every atom from r to k*r (moments become k^n * gamma_n)."""
    k = as_fraction(k)
    if k <= 0:
        raise ValueError("scale factor must be positive")
    tail = c.truncation
    if tail is not None:
        tail = TailBound(tail.mass, tail.position * k)
    return Charge(tuple(Atom(a.position * k, a.density) for a in c.atoms), tail)


def _reweighted(c: Charge, factor, tail_factor) -> Charge:
    tail = c.truncation
    if tail is not None:
        tail = TailBound(tail.mass * tail_factor(tail.position), tail.position)
    return Charge.build([(a.position, a.density * factor(a.position)) for a in c.atoms], tail)


def delta_transform(c: Charge) -> Charge:
    """Charge whose moments are the first differences of the moments of ``c``."""
    return _reweighted(c, lambda r: r - 1, lambda rho: max(Fraction(1), rho - 1))


def delta2_transform(c: Charge) -> Charge:
    """Each atom (r, a) becomes (r, a (1 - r)^2); atoms at 1 vanish."""
    return _reweighted(c, lambda r: (1 - r) ** 2, lambda rho: max(Fraction(1), (rho - 1) ** 2))


def normalize(c: Charge, absolute: bool = False) -> Charge:
    """Divide densities by the total mass, or by its absolute value.

    With ``absolute=True`` a charge of negative total mass keeps its signs.
    """
    total = c.total_mass
    if total == 0:
        raise ZeroDivisionError("charge has zero total mass")
    return c.scaled(1 / (abs(total) if absolute else total))


def sign_census(c: Charge) -> tuple[SignPattern, int, int]:
    signs = tuple(Sign.of(a.density) for a in c.atoms)
    return (
        SignPattern(signs),
        sum(s is Sign.PLUS for s in signs),
        sum(s is Sign.MINUS for s in signs),
    )


class SubnormalVerdict(str, Enum):
    SUBNORMAL = "Subnormal"
    NOT_SUBNORMAL = "NotSubnormal"


def is_subnormal_charge(c: Charge) -> SubnormalVerdict:
    """One strict sign (either one) gives subnormal weights; mixed signs do not.

    An all-negative charge produces the same weight ratios as its negation,
    which is a genuine positive representing measure.
    """
    if not c.atoms:
        raise EmptyCharge("sign test needs at least one atom")
    _, n_plus, n_minus = sign_census(c)
    if n_plus and n_minus:
        return SubnormalVerdict.NOT_SUBNORMAL
    return SubnormalVerdict.SUBNORMAL
