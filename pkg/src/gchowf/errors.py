"""Exception types shared across the package."""


class GchError(Exception):
    """Base class for all package errors."""


class IncompatiblePair(GchError):
    def __init__(self, control, target, reason=""):
        self.control = control
        self.target = target
        self.reason = reason
        msg = f"CNOT({control}->{target}) leaves the GCH family"
        super().__init__(f"{msg}: {reason}" if reason else msg)


class TooLarge(GchError):
    def __init__(self, what, value, cap):
        self.value = value
        self.cap = cap
        super().__init__(f"{what}={value} exceeds cap {cap}")


class InvalidEncoding(GchError):
    """A state encoding broke one of the layout rules; ``rule`` names it."""

    def __init__(self, rule, detail=""):
        self.rule = rule
        self.detail = detail
        super().__init__(f"{rule}: {detail}" if detail else rule)


class MalformedCircuitEncoding(GchError):
    def __init__(self, offset, detail):
        self.offset = offset
        self.detail = detail
        super().__init__(f"malformed circuit encoding at byte {offset}: {detail}")


class SamplingExhausted(GchError):
    pass


class RetriesExhausted(GchError):
    pass


class OffBasisInput(GchError):
    pass


class DimensionMismatch(GchError):
    pass


class UnsupportedSize(GchError, ValueError):
    """Qubit count outside what the construction supports (n even, n >= 4)."""
