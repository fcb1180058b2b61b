"""Dense state-vector engine for n ion qubits plus the CM phonon mode.

Amplitude index bit 0 is the CM occupation (0 or 1); bit k+1 is qubit k
(0 = |g⟩, 1 = |e⟩). Every pulse acts on pairs of amplitudes through a numpy
reshape view, so no index arrays are materialized.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from phasedrift.exceptions import (
    ArtifactWriteError,
    DimensionMismatchError,
    ImpossibleOutcomeError,
    QubitIndexError,
    UsageError,
)

if TYPE_CHECKING:
    from phasedrift.models.state import BasisLabel

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]

CM = -1
"""Ion index designating the CM mode in :func:`project_qubit`."""

ZERO_PROBABILITY = 1e-30
DUMP_THRESHOLD = 1e-15


class QuantumState:
    """Complex amplitudes over ``n_qubits`` qubits and one CM bit.

    The object is mutable; every ``apply_*`` function updates it in place and
    returns it so calls chain.
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: ComplexArray) -> None:
        if n_qubits < 1:
            raise UsageError("a state needs at least one qubit", context={"n_qubits": n_qubits})
        expected = 1 << (n_qubits + 1)
        if amplitudes.shape != (expected,):
            raise UsageError(
                "amplitude array has the wrong length",
                context={"expected": expected, "actual": amplitudes.shape},
            )
        self.n_qubits = n_qubits
        self.amplitudes: ComplexArray = np.ascontiguousarray(amplitudes, dtype=np.complex128)

    @classmethod
    def zero(cls, n_qubits: int = 18) -> QuantumState:
        """All ions in |g⟩, CM in |0⟩."""
        return cls.basis(n_qubits, 0, 0)

    @classmethod
    def basis(cls, n_qubits: int, qubit_bits: int, cm: int = 0) -> QuantumState:
        if not 0 <= qubit_bits < (1 << n_qubits):
            raise UsageError(
                "qubit_bits does not fit the register",
                context={"qubit_bits": qubit_bits, "n_qubits": n_qubits},
            )
        if cm not in (0, 1):
            raise UsageError("cm occupation must be 0 or 1", context={"cm": cm})
        amps = np.zeros(1 << (n_qubits + 1), dtype=np.complex128)
        amps[(qubit_bits << 1) | cm] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_label(cls, n_qubits: int, label: BasisLabel) -> QuantumState:
        return cls.basis(n_qubits, label.qubit_bits, label.cm)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.shape[0])

    def copy(self) -> QuantumState:
        return QuantumState(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> FloatArray:
        return np.abs(self.amplitudes) ** 2

    def cm_excitation(self) -> float:
        """Total probability of the CM mode being occupied."""
        return float(np.sum(np.abs(self.amplitudes[1::2]) ** 2))

    def dump_lines(self) -> list[str]:
        """``index,re,im`` for every amplitude with |amp|² above the dump threshold."""
        probs = self.probabilities()
        lines = []
        for index in np.flatnonzero(probs > DUMP_THRESHOLD):
            amp = self.amplitudes[index]
            lines.append(f"{int(index)},{amp.real:.17g},{amp.imag:.17g}")
        return lines

    def write_dump(self, path: str | Path) -> Path:
        target = Path(path)
        try:
            target.write_text("\n".join(self.dump_lines()) + "\n", encoding="utf-8")
        except OSError as exc:
            raise ArtifactWriteError(str(target), f"Could not write state dump: {exc}") from exc
        logger.info("Wrote state dump to %s", target)
        return target

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits}, norm={self.norm():.12f})"


def _check_ion(state: QuantumState, ion: int) -> None:
    if not 0 <= ion < state.n_qubits:
        raise QubitIndexError(ion, state.n_qubits)


def _pair_view(state: QuantumState, ion: int) -> ComplexArray:
    # axis 1 selects the ion bit; axis 2 runs over all lower bits (other ions and CM)
    return state.amplitudes.reshape(-1, 2, 1 << (ion + 1))


def _sideband_view(state: QuantumState, ion: int) -> ComplexArray:
    # axes: higher bits, ion bit, bits between, CM bit
    return state.amplitudes.reshape(-1, 2, 1 << ion, 2)


def _rotate(a: ComplexArray, b: ComplexArray, theta: float, phi: float) -> None:
    """Apply [[c, −i e^{−iφ} s], [−i e^{iφ} s, c]] to the component pair (a, b) in place."""
    c = math.cos(theta)
    s = math.sin(theta)
    off_ab = -1j * complex(math.cos(-phi), math.sin(-phi)) * s
    off_ba = -1j * complex(math.cos(phi), math.sin(phi)) * s
    a_old = a.copy()
    a *= c
    a += off_ab * b
    b *= c
    b += off_ba * a_old


def coupled_pair(
    state: QuantumState, ion: int, sideband: bool = False
) -> tuple[ComplexArray, ComplexArray]:
    """Views of the two amplitude blocks a pulse on ``ion`` mixes.

    Resonant pulses pair |g⟩ with |e⟩; sideband pulses pair |g⟩|1⟩_CM with
    |e⟩|0⟩_CM. The views alias ``state.amplitudes``.
    """
    _check_ion(state, ion)
    if sideband:
        view = _sideband_view(state, ion)
        return view[:, 0, :, 1], view[:, 1, :, 0]
    pair = _pair_view(state, ion)
    return pair[:, 0, :], pair[:, 1, :]


def apply_resonant(state: QuantumState, ion: int, theta: float, phi: float) -> QuantumState:
    """Rotate ion ``ion`` in its {|g⟩, |e⟩} space; CM and other ions untouched."""
    _rotate(*coupled_pair(state, ion), theta, phi)
    return state


def apply_sideband(state: QuantumState, ion: int, theta: float, phi: float) -> QuantumState:
    """Rotate the {|g⟩|1⟩_CM, |e⟩|0⟩_CM} subspace of ion ``ion``.

    |g⟩|0⟩_CM and |e⟩|1⟩_CM components are left unchanged.
    """
    _rotate(*coupled_pair(state, ion, sideband=True), theta, phi)
    return state


def apply_aux_2pi(state: QuantumState, ion: int) -> QuantumState:
    """Perfect 2π cycle through the auxiliary level: −1 on |g⟩|1⟩_CM."""
    _check_ion(state, ion)
    _sideband_view(state, ion)[:, 0, :, 1] *= -1.0
    return state


def apply_aux_phase(state: QuantumState, ion: int, phase: float) -> QuantumState:
    """Perfect conditional phase e^{i·phase} on |g⟩|1⟩_CM."""
    _check_ion(state, ion)
    _sideband_view(state, ion)[:, 0, :, 1] *= complex(math.cos(phase), math.sin(phase))
    return state


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """Inner product ⟨a|b⟩."""
    if a.dimension != b.dimension:
        raise DimensionMismatchError(a.dimension, b.dimension)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _branch(state: QuantumState, ion: int) -> tuple[ComplexArray, ComplexArray]:
    if ion == CM:
        view = state.amplitudes.reshape(-1, 2)
        return view[:, 0], view[:, 1]
    _check_ion(state, ion)
    view = _pair_view(state, ion)
    return view[:, 0, :], view[:, 1, :]


def project_qubit(
    state: QuantumState,
    ion: int,
    outcome: int,
    *,
    inplace: bool = False,
) -> tuple[float, QuantumState]:
    """Project ``ion`` (or the CM for ``ion == CM``) onto ``outcome`` and renormalize.

    Raises:
        ImpossibleOutcomeError: The branch probability is below 1e-30.
    """
    if outcome not in (0, 1):
        raise UsageError("measurement outcome must be 0 or 1", context={"outcome": outcome})
    target = state if inplace else state.copy()
    zero, one = _branch(target, ion)
    kept, dropped = (zero, one) if outcome == 0 else (one, zero)
    probability = float(np.vdot(kept, kept).real)
    if probability < ZERO_PROBABILITY:
        raise ImpossibleOutcomeError(
            probability=probability,
            context={"ion": ion, "outcome": outcome},
        )
    dropped[...] = 0.0
    target.amplitudes /= math.sqrt(probability)
    return probability, target


def register_distribution(state: QuantumState, bit_selection: Sequence[int]) -> FloatArray:
    """Marginal distribution of the value Σ_i bit(sel[i]) · 2^i.

    All unselected qubits and the CM are summed over.
    """
    selection = list(bit_selection)
    if not selection:
        raise UsageError("bit selection must not be empty")
    if len(set(selection)) != len(selection):
        raise UsageError("bit selection has duplicate qubits", context={"selection": selection})
    for q in selection:
        _check_ion(state, q)
    n = state.n_qubits
    probs = state.probabilities().reshape([2] * (n + 1))
    # axis 0 is the most significant qubit (n-1); qubit q lives on axis n-1-q
    axes = [n - 1 - q for q in reversed(selection)]
    moved = np.moveaxis(probs, axes, list(range(len(axes))))
    marginal = moved.reshape(1 << len(axes), -1).sum(axis=1)
    return np.asarray(marginal, dtype=np.float64)
