"""Exception types raised by the simulator.

Everything a caller can fix (bad window, bad kind, bad input matrix) is a
ValueError subclass; a KernelViolationError means the construction itself
is broken.
"""


class UnknownKindError(ValueError):
    """Raised for a Yang-Baxter kind outside the catalog."""


class NonHermitianError(ValueError):
    """Raised when a Hermitian-only routine receives a non-Hermitian matrix."""


class SizeCapError(ValueError):
    """Raised when a tensor level would exceed the configured size cap."""

    def __init__(self, dim: int, cap: int):
        self.dim = dim
        self.cap = cap
        super().__init__(f"tensor level of dimension {dim} exceeds the size cap {cap}")


class WindowOverflowError(ValueError):
    """Raised when modes fall outside the mode window.

    ``required`` is the smallest (lo, hi) window that would have fitted.
    """

    def __init__(self, message: str, required: tuple[int, int]):
        self.required = required
        super().__init__(f"{message}; required window {required[0]}..{required[1]}")


class PreconditionError(ValueError):
    """Raised when an operation's input contract does not hold."""


class NilpotenceError(ValueError):
    """Raised when no nilpotence shift exists below the search cap."""


class KernelViolationError(RuntimeError):
    """Raised when a creator block cannot be solved on the Gram quotient."""


class ExpressionSyntaxError(ValueError):
    """Raised by the expression parser; ``offset`` is the 0-based position."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")
