"""Cirac–Zoller gate constructions as pulse sequences, and the pulse executor.

All constructions assume the CM mode is in |0⟩ on entry and return it to
|0⟩ in the noiseless case. Angles use θ = Ωt (see
:mod:`phasedrift.models.pulse`): full transfer is θ = π/2.

Noiseless actions, with operands ordered (control, target):

- ``cz_gate``: exactly diag(1, 1, 1, −1).
- ``controlled_phase_gate(α)``: exactly diag(1, 1, 1, e^{iα}).
- ``cnot_gate``: exactly CNOT.
- ``x_gate``: −i·X. ``hadamard_gate``: −i·H. ``phase_gate(α)``: diag(1, e^{iα})
  up to the phase −e^{−iα/2}.
"""

from __future__ import annotations

import logging
import math

from phasedrift import statevec
from phasedrift.exceptions import QubitIndexError, UsageError
from phasedrift.models.noise import NoiseModel
from phasedrift.models.pulse import Pulse, PulseKind, PulseSequence
from phasedrift.noise import RunRng, derive_run_rng, perturb
from phasedrift.statevec import QuantumState

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

# Resonant phases conjugating CZ into CNOT on the target.
CNOT_PRE_PHI = 3 * HALF_PI
CNOT_POST_PHI = HALF_PI


def _distinct(*qubits: int) -> None:
    if len(set(qubits)) != len(qubits):
        raise UsageError("gate operands must be distinct", context={"qubits": qubits})


def single_qubit_rotation(ion: int, theta: float, phi: float) -> PulseSequence:
    """One resonant pulse; emitted even for θ = 0."""
    return PulseSequence.of(Pulse.resonant(ion, theta, phi))


def x_gate(ion: int) -> PulseSequence:
    """Bit flip as one full-transfer resonant pulse.

    Args:
        ion: Target ion.

    Returns:
        One pulse (θ = π/2, φ = 0) acting as −i·X.
    """
    return single_qubit_rotation(ion, HALF_PI, 0.0)


def hadamard_gate(ion: int) -> PulseSequence:
    """Hadamard up to the global phase −i.

    Args:
        ion: Target ion.

    Returns:
        A half-transfer pulse at φ = π/2 followed by a full transfer at φ = 0.
    """
    return PulseSequence.of(
        Pulse.resonant(ion, QUARTER_PI, HALF_PI),
        Pulse.resonant(ion, HALF_PI, 0.0),
    )


def phase_gate(ion: int, angle: float) -> PulseSequence:
    """diag(1, e^{i·angle}) from two full-transfer pulses whose phases differ by angle/2.

    Args:
        ion: Target ion.
        angle: Relative phase α put on |e⟩.

    Returns:
        Two resonant pulses; the gate carries the global phase −e^{−iα/2}.
    """
    return PulseSequence.of(
        Pulse.resonant(ion, HALF_PI, 0.0),
        Pulse.resonant(ion, HALF_PI, angle / 2),
    )


def cz_gate(control: int, target: int) -> PulseSequence:
    """Sideband(control, π/2, 0); Aux2Pi(target); Sideband(control, π/2, 0)."""
    _distinct(control, target)
    return PulseSequence.of(
        Pulse.sideband(control, HALF_PI, 0.0),
        Pulse.aux_2pi(target),
        Pulse.sideband(control, HALF_PI, 0.0),
    )


def controlled_phase_gate(control: int, target: int, angle: float) -> PulseSequence:
    """CZ-style triple with a perfect conditional phase in place of the 2π cycle."""
    _distinct(control, target)
    return PulseSequence.of(
        Pulse.sideband(control, HALF_PI, 0.0),
        Pulse.aux_phase(target, -angle),
        Pulse.sideband(control, HALF_PI, angle + math.pi),
    )


def cnot_gate(control: int, target: int) -> PulseSequence:
    """CNOT as a CZ between two half-transfer pulses on the target.

    Args:
        control: Control ion; its sideband pulses carry the bus excitation.
        target: Target ion.

    Returns:
        Five pulses: resonant, sideband, 2π auxiliary cycle, sideband, resonant.

    Raises:
        UsageError: If ``control == target``.
    """
    _distinct(control, target)
    return (
        PulseSequence.of(Pulse.resonant(target, QUARTER_PI, CNOT_PRE_PHI))
        + cz_gate(control, target)
        + PulseSequence.of(Pulse.resonant(target, QUARTER_PI, CNOT_POST_PHI))
    )


def swap_gate(a: int, b: int) -> PulseSequence:
    """Three alternating CNOTs."""
    _distinct(a, b)
    return cnot_gate(a, b) + cnot_gate(b, a) + cnot_gate(a, b)


def toffoli_gate(c1: int, c2: int, target: int) -> PulseSequence:
    """Six-CNOT Toffoli with T and Hadamard gates on the operands."""
    _distinct(c1, c2, target)
    t = math.pi / 4
    parts = [
        hadamard_gate(target),
        cnot_gate(c2, target),
        phase_gate(target, -t),
        cnot_gate(c1, target),
        phase_gate(target, t),
        cnot_gate(c2, target),
        phase_gate(target, -t),
        cnot_gate(c1, target),
        phase_gate(c2, t),
        phase_gate(target, t),
        hadamard_gate(target),
        cnot_gate(c1, c2),
        phase_gate(c1, t),
        phase_gate(c2, -t),
        cnot_gate(c1, c2),
    ]
    return PulseSequence.concat(parts)


def apply_pulse(
    state: QuantumState,
    pulse: Pulse,
    rng: RunRng | None = None,
) -> QuantumState:
    """Apply one pulse; erroneous pulses are perturbed when ``rng`` is given."""
    match pulse.kind:
        case PulseKind.AUX_2PI:
            return statevec.apply_aux_2pi(state, pulse.ion)
        case PulseKind.AUX_PHASE:
            assert pulse.phi is not None
            return statevec.apply_aux_phase(state, pulse.ion, pulse.phi)
        case _:
            assert pulse.theta is not None and pulse.phi is not None
            if rng is not None and pulse.erroneous:
                theta, phi = perturb(pulse, rng)
            else:
                theta, phi = pulse.theta, pulse.phi
            if pulse.kind is PulseKind.RESONANT:
                return statevec.apply_resonant(state, pulse.ion, theta, phi)
            return statevec.apply_sideband(state, pulse.ion, theta, phi)


def execute(
    state: QuantumState,
    sequence: PulseSequence,
    noise: NoiseModel | None = None,
    rng: RunRng | None = None,
) -> QuantumState:
    """Run ``sequence`` on ``state`` in place.

    With ``noise`` set and no ``rng``, run 0 of that model is used. A noise
    model with σ = ε̄ = 0 still consumes draws and reproduces the noiseless
    result bit for bit.
    """
    for pulse in sequence:
        if pulse.ion >= state.n_qubits:
            raise QubitIndexError(pulse.ion, state.n_qubits)
    if noise is not None and rng is None:
        rng = derive_run_rng(noise, 0)
    logger.debug("Executing %d pulses (noisy=%s)", len(sequence), rng is not None)
    for pulse in sequence:
        apply_pulse(state, pulse, rng)
    return state
