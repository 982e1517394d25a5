"""Moment and weight sequences, forward differences, and finite-depth
complete monotonicity / alternation checks.

Sequences are lazy: a pure generator ``n -> Fraction`` plus a memo table.
Weights are stored as their exact squares alpha_n^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .charge import Charge
from .errors import NonpositiveRatio, NonpositiveResult, UnitWeight, ZeroMoment
from .rational import RationalLike, as_fraction

DEFAULT_DEPTH = 10
DEFAULT_HORIZON = 32


class _Lazy:
    """Memoized exact sequence.  Memo writes are idempotent, so concurrent
    evaluation is safe."""

    def __init__(self, generator: Callable[[int], RationalLike], known_length: Optional[int] = None):
        self._gen = generator
        self._memo: dict[int, Fraction] = {}
        self.known_length = known_length

    def _check_index(self, n: int) -> None:
        if n < 0:
            raise IndexError("sequence index must be nonnegative")
        if self.known_length is not None and n >= self.known_length:
            raise IndexError(f"index {n} beyond known length {self.known_length}")

    def __getitem__(self, n: int) -> Fraction:
        self._check_index(n)
        try:
            return self._memo[n]
        except KeyError:
            value = as_fraction(self._gen(n))
            self._memo[n] = value
            return value

    def prefix(self, count: int) -> list[Fraction]:
        return [self[n] for n in range(count)]


class MomentSeq(_Lazy):
    @classmethod
    def from_charge(cls, c: Charge) -> "MomentSeq":
        return cls(c.moment)

    @classmethod
    def from_values(cls, values: Iterable[RationalLike]) -> "MomentSeq":
        table = [as_fraction(v) for v in values]
        return cls(table.__getitem__, known_length=len(table))

    @classmethod
    def constant(cls, value: RationalLike) -> "MomentSeq":
        value = as_fraction(value)
        return cls(lambda n: value)

    def normalized(self) -> "MomentSeq":
        """Divide through by gamma_0 so the sequence starts at 1."""
        g0 = self[0]
        if g0 == 0:
            raise ZeroMoment(0, "cannot normalize a sequence starting at 0")
        return MomentSeq(lambda n: self[n] / g0, self.known_length)

    def __neg__(self) -> "MomentSeq":
        return MomentSeq(lambda n: -self[n], self.known_length)


class WeightSeq(_Lazy):
    """Weights stored as squares; every evaluated square must be positive."""

    def __getitem__(self, n: int) -> Fraction:
        value = super().__getitem__(n)
        if value <= 0:
            raise NonpositiveResult(n, f"weight square {value} is not positive")
        return value

    @classmethod
    def from_squares(cls, squares: Sequence[RationalLike]) -> "WeightSeq":
        table = [as_fraction(v) for v in squares]
        return cls(table.__getitem__, known_length=len(table))

    @classmethod
    def constant(cls, square: RationalLike) -> "WeightSeq":
        square = as_fraction(square)
        return cls(lambda n: square)


def _shorter(length: Optional[int], by: int) -> Optional[int]:
    return None if length is None else max(length - by, 0)


def delta(s: MomentSeq) -> MomentSeq:
    return MomentSeq(lambda n: s[n + 1] - s[n], _shorter(s.known_length, 1))


def nabla(s: MomentSeq) -> MomentSeq:
    return MomentSeq(lambda n: s[n] - s[n + 1], _shorter(s.known_length, 1))


def delta_pow(s: MomentSeq, k: int) -> MomentSeq:
    if k < 0:
        raise ValueError("difference order must be nonnegative")
    for _ in range(k):
        s = delta(s)
    return s


def moments_from_weights(w: WeightSeq) -> MomentSeq:
    """gamma_0 = 1, gamma_{n+1} = gamma_n * alpha_n^2."""
    table = [Fraction(1)]

    def gen(n: int) -> Fraction:
        while len(table) <= n:
            table.append(table[-1] * w[len(table) - 1])
        return table[n]

    return MomentSeq(gen, None if w.known_length is None else w.known_length + 1)


def weights_from_moments(m: MomentSeq, count: int) -> WeightSeq:
    """alpha_n^2 = gamma_{n+1}/gamma_n for n < count, checked eagerly."""
    squares = []
    for n in range(count):
        g = m[n]
        if g == 0:
            raise ZeroMoment(n)
        ratio = m[n + 1] / g
        if ratio <= 0:
            raise NonpositiveRatio(n, f"gamma_{n + 1}/gamma_{n} = {ratio}")
        squares.append(ratio)
    return WeightSeq.from_squares(squares)


def delta_on_weights(w: WeightSeq) -> WeightSeq:
    """Weights of the shift whose moments are (normalized) first differences.

    new alpha_n^2 = alpha_n^2 (alpha_{n+1}^2 - 1) / (alpha_n^2 - 1)
    """

    def gen(n: int) -> Fraction:
        a0 = w[n]
        if a0 == 1:
            raise UnitWeight(n)
        value = a0 * (w[n + 1] - 1) / (a0 - 1)
        if value <= 0:
            raise NonpositiveResult(n, f"transformed weight square {value}")
        return value

    return WeightSeq(gen, _shorter(w.known_length, 1))


@dataclass(frozen=True)
class MonotoneVerdict:
    """Finite evidence only: ``passed`` means no violation for k <= depth,
    n <= horizon.  ``witness`` is the first (k, n) violation in (k, n) order."""

    passed: bool
    depth: int
    horizon: int
    witness: Optional[tuple[int, int]] = None
    witness_value: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.passed


def _difference_scan(
    values: list[Fraction], orders: range, horizon: int, sign_of_order: Callable[[int], int]
) -> Optional[tuple[int, int, Fraction]]:
    row = values
    k = 0
    for target in orders:
        while k < target:
            row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
            k += 1
        sgn = sign_of_order(k)
        for n in range(horizon + 1):
            if sgn * row[n] < 0:
                return k, n, sgn * row[n]
    return None


def _values_for(s: MomentSeq, count: int) -> list[Fraction]:
    if s.known_length is not None and s.known_length < count:
        raise ValueError(f"need {count} terms, sequence only has {s.known_length}")
    return s.prefix(count)


def completely_monotone_check(
    s: MomentSeq, depth: int = DEFAULT_DEPTH, horizon: int = DEFAULT_HORIZON
) -> MonotoneVerdict:
    """(nabla^k s)_n >= 0 for k <= depth, n <= horizon."""
    if depth < 0 or horizon < 0:
        raise ValueError("depth and horizon must be nonnegative")
    values = _values_for(s, horizon + depth + 1)
    hit = _difference_scan(values, range(depth + 1), horizon, lambda k: (-1) ** k)
    if hit is None:
        return MonotoneVerdict(True, depth, horizon)
    k, n, v = hit
    return MonotoneVerdict(False, depth, horizon, (k, n), v)


def completely_alternating_check(
    s: MomentSeq, depth: int = DEFAULT_DEPTH, horizon: int = DEFAULT_HORIZON
) -> MonotoneVerdict:
    """Delta(s) completely monotone: (-1)^(k+1) (Delta^k s)_n >= 0 for
    1 <= k <= depth, n <= horizon.

    The witness ``(k, n)`` reports the order k of the offending Delta^k.
    """
    if depth < 0 or horizon < 0:
        raise ValueError("depth and horizon must be nonnegative")
    values = _values_for(s, horizon + depth + 1)
    hit = _difference_scan(values, range(1, depth + 1), horizon, lambda k: (-1) ** (k + 1))
    if hit is None:
        return MonotoneVerdict(True, depth, horizon)
    k, n, v = hit
    return MonotoneVerdict(False, depth, horizon, (k, n), v)
