"""Circuit construction, lowering to pulses, and pulse accounting."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from functools import lru_cache
from pathlib import Path

import numpy as np
import numpy.typing as npt

from phasedrift import pulse as pulses
from phasedrift.exceptions import ArtifactWriteError, QubitIndexError, UsageError
from phasedrift.models.circuit import CheckpointMark, Circuit, Gate, GateKind
from phasedrift.models.pulse import PulseCounts, PulseSequence

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 10


class CircuitBuilder:
    """Imperative gate-list construction.

    Example:
        builder = CircuitBuilder(3, registers={"data": (0, 1), "work": (2,)})
        builder.h(0).cnot(0, 1).toffoli(0, 1, 2).mark_checkpoint((2,))
        circuit = builder.build()
    """

    def __init__(self, n_qubits: int, registers: dict[str, tuple[int, ...]] | None = None) -> None:
        self.n_qubits = n_qubits
        self.registers = dict(registers or {})
        self._gates: list[Gate] = []

    def __len__(self) -> int:
        return len(self._gates)

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(self._gates)

    def _add(self, gate: Gate) -> CircuitBuilder:
        for q in gate.qubits:
            if q >= self.n_qubits:
                raise QubitIndexError(q, self.n_qubits)
        self._gates.append(gate)
        return self

    def rotation(self, qubit: int, theta: float, phi: float) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.ROTATION, qubits=(qubit,), theta=theta, phi=phi))

    def x(self, qubit: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.X, qubits=(qubit,)))

    def h(self, qubit: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.HADAMARD, qubits=(qubit,)))

    def phase(self, qubit: int, angle: float) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.PHASE, qubits=(qubit,), angle=angle))

    def cz(self, control: int, target: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.CZ, qubits=(control, target)))

    def cnot(self, control: int, target: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.CNOT, qubits=(control, target)))

    def toffoli(self, c1: int, c2: int, target: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.TOFFOLI, qubits=(c1, c2, target)))

    def cphase(self, control: int, target: int, angle: float) -> CircuitBuilder:
        return self._add(
            Gate(kind=GateKind.CONTROLLED_PHASE, qubits=(control, target), angle=angle)
        )

    def swap(self, a: int, b: int) -> CircuitBuilder:
        return self._add(Gate(kind=GateKind.SWAP, qubits=(a, b)))

    def mark_checkpoint(
        self,
        qubits: Iterable[int] = (),
        include_cm: bool = True,
        label: str = "",
    ) -> CircuitBuilder:
        """Mark the last gate: afterwards ``qubits`` (and the CM) are ideally |0⟩.

        Marks placed on the same gate are merged.
        """
        if not self._gates:
            raise UsageError("cannot mark a checkpoint before the first gate")
        marked = tuple(sorted(set(qubits)))
        for q in marked:
            if q >= self.n_qubits:
                raise QubitIndexError(q, self.n_qubits)
        last = self._gates[-1]
        if last.checkpoint is not None:
            previous = last.checkpoint
            marked = tuple(sorted(set(previous.qubits) | set(marked)))
            include_cm = include_cm or previous.include_cm
            label = previous.label if not label else label
        mark = CheckpointMark(qubits=marked, include_cm=include_cm, label=label)
        self._gates[-1] = last.model_copy(update={"checkpoint": mark})
        return self

    def extend(self, gates: Iterable[Gate]) -> CircuitBuilder:
        for gate in gates:
            self._add(gate)
        return self

    def extend_inverse(self, gates: Sequence[Gate]) -> CircuitBuilder:
        return self.extend(inverse_gates(gates))

    def build(self) -> Circuit:
        return Circuit(n_qubits=self.n_qubits, registers=self.registers, gates=tuple(self._gates))


def inverse_gates(gates: Sequence[Gate]) -> list[Gate]:
    """Adjoint of a gate list: reversed order, each gate inverted, marks dropped."""
    return [gate.inverse() for gate in reversed(gates)]


@lru_cache(maxsize=8192)
def lower_gate(gate: Gate) -> PulseSequence:
    """Pulse sequence of a single gate."""
    q = gate.qubits
    match gate.kind:
        case GateKind.ROTATION:
            assert gate.theta is not None and gate.phi is not None
            return pulses.single_qubit_rotation(q[0], gate.theta, gate.phi)
        case GateKind.X:
            return pulses.x_gate(q[0])
        case GateKind.HADAMARD:
            return pulses.hadamard_gate(q[0])
        case GateKind.PHASE:
            assert gate.angle is not None
            return pulses.phase_gate(q[0], gate.angle)
        case GateKind.CZ:
            return pulses.cz_gate(q[0], q[1])
        case GateKind.CNOT:
            return pulses.cnot_gate(q[0], q[1])
        case GateKind.TOFFOLI:
            return pulses.toffoli_gate(q[0], q[1], q[2])
        case GateKind.CONTROLLED_PHASE:
            assert gate.angle is not None
            return pulses.controlled_phase_gate(q[0], q[1], gate.angle)
        case GateKind.SWAP:
            return pulses.swap_gate(q[0], q[1])
        case _:
            raise UsageError("unknown gate kind", context={"kind": gate.kind})


def compile_circuit(circuit: Circuit) -> PulseSequence:
    """Concatenate the per-gate pulse sequences in gate order."""
    sequence = PulseSequence.concat(lower_gate(gate) for gate in circuit.gates)
    logger.info(
        "Compiled %d gates into %d pulses (%d resonant, %d sideband, %d aux)",
        len(circuit.gates),
        len(sequence),
        sequence.n_resonant,
        sequence.n_sideband,
        sequence.n_aux,
    )
    return sequence


def pulse_counts(sequence: PulseSequence) -> PulseCounts:
    return PulseCounts(
        n_resonant=sequence.n_resonant,
        n_sideband=sequence.n_sideband,
        n_aux=sequence.n_aux,
    )


def dump_lines(circuit: Circuit) -> list[str]:
    return [gate.to_line() for gate in circuit.gates]


def write_dump(circuit: Circuit, path: str | Path) -> Path:
    target = Path(path)
    try:
        target.write_text("\n".join(dump_lines(circuit)) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ArtifactWriteError(str(target), f"Could not write circuit dump: {exc}") from exc
    return target


# Dense reference matrices; operand order (first listed = most significant).

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)


def _rotation_matrix(theta: float, phi: float) -> npt.NDArray[np.complex128]:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [c, -1j * np.exp(-1j * phi) * s],
            [-1j * np.exp(1j * phi) * s, c],
        ],
        dtype=np.complex128,
    )


def _controlled(u: npt.NDArray[np.complex128], n_controls: int) -> npt.NDArray[np.complex128]:
    dim = u.shape[0] << n_controls
    matrix = np.eye(dim, dtype=np.complex128)
    matrix[-u.shape[0] :, -u.shape[0] :] = u
    return matrix


def gate_matrix(gate: Gate) -> npt.NDArray[np.complex128]:
    """Exact unitary of ``gate`` on its operands."""
    match gate.kind:
        case GateKind.ROTATION:
            assert gate.theta is not None and gate.phi is not None
            return _rotation_matrix(gate.theta, gate.phi)
        case GateKind.X:
            return _X.copy()
        case GateKind.HADAMARD:
            return _H.copy()
        case GateKind.PHASE:
            assert gate.angle is not None
            return np.diag([1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
        case GateKind.CZ:
            return np.diag([1.0, 1.0, 1.0, -1.0]).astype(np.complex128)
        case GateKind.CNOT:
            return _controlled(_X, 1)
        case GateKind.TOFFOLI:
            return _controlled(_X, 2)
        case GateKind.CONTROLLED_PHASE:
            assert gate.angle is not None
            return np.diag([1.0, 1.0, 1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
        case GateKind.SWAP:
            return np.array(
                [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
            )
        case _:
            raise UsageError("unknown gate kind", context={"kind": gate.kind})


def ideal_matrix(circuit: Circuit) -> npt.NDArray[np.complex128]:
    """Dense ideal unitary of a small circuit.

    Row and column index is the qubit bitmask (bit k = qubit k), matching
    ``QuantumState.basis``.
    """
    n = circuit.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise UsageError(
            "circuit too wide for a dense matrix",
            context={"n_qubits": n, "max": MAX_DENSE_QUBITS},
        )
    dim = 1 << n
    # tensor axes: qubit k on axis n-1-k, then one axis over columns
    tensor = np.eye(dim, dtype=np.complex128).reshape([2] * n + [dim])
    for gate in circuit.gates:
        axes = [n - 1 - q for q in gate.qubits]
        k = len(axes)
        moved = np.moveaxis(tensor, axes, list(range(k)))
        shape = moved.shape
        updated = (gate_matrix(gate) @ moved.reshape(1 << k, -1)).reshape(shape)
        tensor = np.moveaxis(updated, list(range(k)), axes)
    return tensor.reshape(dim, dim)
