"""Custom exceptions for the phasedrift simulator."""

from typing import Any


class PhaseDriftError(Exception):
    """Base exception for all phasedrift errors."""

    def __init__(
        self,
        message: str,
        context: dict[str, Any] | None = None,
    ) -> None:
        self.message = message
        self.context = context or {}
        super().__init__(message)

    def __str__(self) -> str:
        if self.context:
            details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
            return f"{self.message} ({details})"
        return self.message


class UsageError(PhaseDriftError):
    """Raised when an operation is called with arguments violating its preconditions."""


class QubitIndexError(UsageError):
    """Raised when an ion or qubit index is out of range."""

    def __init__(
        self,
        index: int,
        n_qubits: int,
        message: str = "Qubit index out of range",
    ) -> None:
        self.index = index
        self.n_qubits = n_qubits
        super().__init__(message, context={"index": index, "n_qubits": n_qubits})


class DimensionMismatchError(UsageError):
    """Raised when two states of different dimension are combined."""

    def __init__(
        self,
        left: int,
        right: int,
        message: str = "State dimensions differ",
    ) -> None:
        self.left = left
        self.right = right
        super().__init__(message, context={"left": left, "right": right})


class ImpossibleOutcomeError(PhaseDriftError):
    """Raised when projecting onto a measurement branch of (numerically) zero probability."""

    def __init__(
        self,
        message: str = "Measurement outcome has zero probability",
        probability: float = 0.0,
        context: dict[str, Any] | None = None,
    ) -> None:
        self.probability = probability
        super().__init__(message, context=context)


class ConstructionError(PhaseDriftError):
    """Raised when a circuit cannot be built for the requested layout."""


class InconclusiveMeasurementError(PhaseDriftError):
    """Raised when measured peaks do not yield a verified order; the caller should retry."""

    def __init__(
        self,
        message: str = "Measurement does not determine the order",
        peaks: list[int] | None = None,
    ) -> None:
        self.peaks = peaks or []
        super().__init__(message, context={"peaks": self.peaks} if self.peaks else None)


class RetryWithNewBaseError(PhaseDriftError):
    """Raised when the order does not produce nontrivial factors; retry with another base."""

    def __init__(
        self,
        message: str = "Order yields no nontrivial factor",
        y: int | None = None,
        r: int | None = None,
    ) -> None:
        self.y = y
        self.r = r
        super().__init__(message, context={"y": y, "r": r})


class InvariantViolationError(PhaseDriftError):
    """Raised when an experiment detects a violated invariant."""


class ArtifactWriteError(PhaseDriftError):
    """Raised when an output artifact cannot be written."""

    def __init__(
        self,
        path: str,
        message: str = "Could not write artifact",
    ) -> None:
        self.path = path
        super().__init__(message, context={"path": path})
