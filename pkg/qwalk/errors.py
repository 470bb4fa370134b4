"""
qwalk 例外階層

每個例外都帶有 exit_code，CLI 依此回傳不同的結束碼。
"""

from typing import Any, Dict, Optional


class QWalkError(Exception):
    """Base class for every diagnostic raised by qwalk."""

    exit_code: int = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class UsageError(QWalkError):
    """Bad command-line usage or configuration."""

    exit_code = 2


# === 解析錯誤 (exit 4) ===

class ParseError(QWalkError):
    exit_code = 4


class GraphError(ParseError):
    """A graph description violates a WalkGraph invariant."""


class SlotAssignmentError(GraphError):
    """A (vertex, slot) is uncovered, covered twice, or out of range."""


class CoinDegreeError(GraphError):
    """A vertex's coin degree differs from its slot count."""


class UnknownCoinError(GraphError):
    pass


class DuplicateVertexError(GraphError):
    pass


class UnknownVertexError(GraphError):
    pass


class CircuitError(ParseError):
    """A circuit file is malformed."""


class UnknownGateError(CircuitError):
    pass


class QubitIndexError(CircuitError):
    pass


class ControlTargetError(CircuitError):
    """C-NOT with control equal to target."""


class CoinDomainError(QWalkError, ValueError):
    """Coin parameter outside its domain (bias outside [0, 1], degree < 1)."""

    exit_code = 4


# === 不變量違反 (exit 5) ===

class InvariantError(QWalkError):
    exit_code = 5


class CoinConstructionError(InvariantError):
    """A derived coin does not reproduce its reference matrix."""


class NormalizationError(InvariantError):
    pass


class SynchronizationError(InvariantError):
    """Probability found off the output rails at the scheduled readout step."""

    def __init__(self, message: str, column: Optional[int] = None, **context: Any):
        super().__init__(message, column=column, **context)
        self.column = column


class VerificationError(InvariantError):
    """A compiled circuit does not match its circuit-model oracle."""

    def __init__(self, message: str, report: Any = None, **context: Any):
        super().__init__(message, **context)
        self.report = report


class DimensionMismatchError(InvariantError, ValueError):
    pass
