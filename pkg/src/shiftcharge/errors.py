"""Exception types raised by shiftcharge."""


class ShiftChargeError(Exception):
    """Base class for all library errors."""


class EmptyCharge(ShiftChargeError, ValueError):
    pass


class InvalidCharge(ShiftChargeError, ValueError):
    pass


class InvalidParams(ShiftChargeError, ValueError):
    pass


class IndexedError(ShiftChargeError, ValueError):
    """An error tied to a sequence index ``n``."""

    def __init__(self, n: int, detail: str = ""):
        self.n = n
        msg = f"{type(self).__name__} at n={n}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NonpositiveRatio(IndexedError):
    """gamma_{n+1}/gamma_n <= 0: no shift with positive weights."""


class ZeroMoment(IndexedError):
    pass


class UnitWeight(IndexedError):
    """alpha_n^2 == 1 makes the weight-level difference formula singular."""


class NonpositiveResult(IndexedError):
    pass


class TooFewAtoms(ShiftChargeError, ValueError):
    pass


class DegenerateNormalizer(ShiftChargeError, ArithmeticError):
    pass


class AtomAtOne(InvalidCharge):
    pass


class WrongShape(InvalidCharge):
    pass


class NotIntegrable(ShiftChargeError, ValueError):
    pass


class UnknownPattern(ShiftChargeError, LookupError):
    pass


class TruncationTooDeep(ShiftChargeError, ArithmeticError):
    """Reaching the requested tail bound would need more atoms than allowed."""
