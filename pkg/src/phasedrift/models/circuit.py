"""Gate-level circuit models."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class GateKind(str, Enum):
    """Gate kinds of the circuit IR."""

    ROTATION = "rotation"
    X = "x"
    HADAMARD = "h"
    PHASE = "phase"
    CZ = "cz"
    CNOT = "cnot"
    TOFFOLI = "toffoli"
    CONTROLLED_PHASE = "cphase"
    SWAP = "swap"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def uses_bus(self) -> bool:
        """Whether the lowered pulses route through the CM mode."""
        return self.arity > 1


_ARITY = {
    GateKind.ROTATION: 1,
    GateKind.X: 1,
    GateKind.HADAMARD: 1,
    GateKind.PHASE: 1,
    GateKind.CZ: 2,
    GateKind.CNOT: 2,
    GateKind.TOFFOLI: 3,
    GateKind.CONTROLLED_PHASE: 2,
    GateKind.SWAP: 2,
}


class CheckpointMark(BaseModel):
    """Marks a gate after which the listed qubits are expected in |0⟩."""

    model_config = ConfigDict(frozen=True)

    qubits: tuple[int, ...] = ()
    include_cm: bool = True
    label: str = ""


class Gate(BaseModel):
    """One gate of a circuit.

    Operand order is significant: controls first, target last.
    ``theta``/``phi`` parametrize rotations, ``angle`` phase gates.
    """

    model_config = ConfigDict(frozen=True)

    kind: GateKind
    qubits: tuple[int, ...]
    theta: float | None = None
    phi: float | None = None
    angle: float | None = None
    checkpoint: CheckpointMark | None = None

    @model_validator(mode="after")
    def _check_operands(self) -> Gate:
        if len(self.qubits) != self.kind.arity:
            raise ValueError(
                f"{self.kind.value} gate takes {self.kind.arity} operands, got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind.value} gate operands must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")
        if self.kind is GateKind.ROTATION and (self.theta is None or self.phi is None):
            raise ValueError("rotation gate needs theta and phi")
        if self.kind in (GateKind.PHASE, GateKind.CONTROLLED_PHASE) and self.angle is None:
            raise ValueError(f"{self.kind.value} gate needs an angle")
        return self

    def without_checkpoint(self) -> Gate:
        if self.checkpoint is None:
            return self
        return self.model_copy(update={"checkpoint": None})

    def inverse(self) -> Gate:
        """Adjoint gate (checkpoint markers are not carried over)."""
        match self.kind:
            case GateKind.ROTATION:
                assert self.theta is not None
                return Gate(kind=self.kind, qubits=self.qubits, theta=-self.theta, phi=self.phi)
            case GateKind.PHASE | GateKind.CONTROLLED_PHASE:
                assert self.angle is not None
                return Gate(kind=self.kind, qubits=self.qubits, angle=-self.angle)
            case _:
                return self.without_checkpoint()

    def to_line(self) -> str:
        """Render as ``kind,operands...,checkpoint?``."""
        parts = [self.kind.value, *(str(q) for q in self.qubits)]
        if self.theta is not None:
            parts.append(format(self.theta, ".17g"))
        if self.phi is not None:
            parts.append(format(self.phi, ".17g"))
        if self.angle is not None:
            parts.append(format(self.angle, ".17g"))
        if self.checkpoint is not None:
            marked = " ".join(str(q) for q in self.checkpoint.qubits)
            cm = " cm" if self.checkpoint.include_cm else ""
            parts.append(f"checkpoint[{marked}{cm}]")
        return ",".join(parts)


class Circuit(BaseModel):
    """A gate list over ``n_qubits`` ions with named registers."""

    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(ge=1)
    registers: dict[str, tuple[int, ...]] = Field(default_factory=dict)
    gates: tuple[Gate, ...] = ()

    @model_validator(mode="after")
    def _check_layout(self) -> Circuit:
        seen: set[int] = set()
        for name, qubits in self.registers.items():
            for q in qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"register {name!r} qubit {q} out of range")
                if q in seen:
                    raise ValueError(f"register {name!r} overlaps another register at qubit {q}")
                seen.add(q)
        for position, gate in enumerate(self.gates):
            if any(q >= self.n_qubits for q in gate.qubits):
                raise ValueError(f"gate {position} ({gate.kind.value}) addresses qubit out of range")
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def register(self, name: str) -> tuple[int, ...]:
        return self.registers[name]

    def then(self, other: Circuit) -> Circuit:
        """Sequential composition (``self`` first)."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot compose circuits of different width")
        registers = {**self.registers, **other.registers}
        return Circuit(n_qubits=self.n_qubits, registers=registers, gates=self.gates + other.gates)
