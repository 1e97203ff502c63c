"""Exception types shared across the package."""


class QftArithError(Exception):
    """Base class for every error raised by this package."""


class RangeError(QftArithError, ValueError):
    """An integer does not fit the requested two's-complement width."""


class WidthError(QftArithError, ValueError):
    """Register widths violate ``2 <= m <= n`` (or a block's own bound)."""


class LoopBoundExceeded(QftArithError):
    """A repeat-until loop reached ``max_iters`` without its flag reaching ``expect``."""

    def __init__(self, label: str, max_iters: int):
        super().__init__(f"loop {label!r} exceeded max_iters={max_iters}")
        self.label = label
        self.max_iters = max_iters


class DivisionByZero(QftArithError, ZeroDivisionError):
    pass


class NegativeExponent(QftArithError, ValueError):
    pass


class NormError(QftArithError):
    """Statevector norm drifted past tolerance."""


class NotPure(QftArithError):
    """Program holds measurements or loops where a unitary was requested."""


class UnsupportedExport(QftArithError):
    pass


class UnknownOp(QftArithError, KeyError):
    pass


class ResourceBound(QftArithError):
    """A sweep would need more qubits than the configured cap."""
