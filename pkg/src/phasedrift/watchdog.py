"""Watchdog (quantum Zeno) supervision of noisy runs.

Gates are lowered and executed one at a time, so the pulse order and the
random draws match an unsupervised run with the same ``RunRng``. At each
checkpoint the listed qubits and optionally the CM are projected onto |0⟩
and the branch probability is multiplied into the survival.
"""

from __future__ import annotations

import logging
import math
from typing import Protocol

from phasedrift import statevec
from phasedrift.circuit import lower_gate
from phasedrift.exceptions import ImpossibleOutcomeError, UsageError
from phasedrift.metrics import fidelity
from phasedrift.models.circuit import Circuit, Gate
from phasedrift.models.noise import NoiseModel
from phasedrift.models.watchdog import Checkpoint, WatchdogMode, WatchdogOutcome, WatchdogSchedule
from phasedrift.noise import RunRng, derive_run_rng
from phasedrift.pulse import execute
from phasedrift.statevec import QuantumState

logger = logging.getLogger(__name__)


class IdealOracle(Protocol):
    """Supplies ideal states to compare a supervised run against."""

    def reset(self) -> None: ...

    def advance(self, gate: Gate) -> None: ...

    def state_at_checkpoint(self) -> QuantumState: ...

    def terminal(self) -> QuantumState: ...


class NoiselessTrajectory:
    """Runs the circuit noiselessly in lock-step with the supervised run."""

    def __init__(self, n_qubits: int) -> None:
        self.n_qubits = n_qubits
        self._state = QuantumState.zero(n_qubits)

    def reset(self) -> None:
        self._state = QuantumState.zero(self.n_qubits)

    def advance(self, gate: Gate) -> None:
        execute(self._state, lower_gate(gate))

    def state_at_checkpoint(self) -> QuantumState:
        return self._state

    def terminal(self) -> QuantumState:
        return self._state


class AnalyticOracle:
    """Knows only the terminal ideal state."""

    def __init__(self, terminal_state: QuantumState) -> None:
        self._terminal = terminal_state

    def reset(self) -> None:
        pass

    def advance(self, gate: Gate) -> None:  # noqa: ARG002
        pass

    def state_at_checkpoint(self) -> QuantumState:
        raise UsageError("an analytic oracle has no intermediate ideal states")

    def terminal(self) -> QuantumState:
        return self._terminal


def schedule_from_circuit(
    circuit: Circuit,
    cm_after_bus_gates: bool = True,
    work_markers: bool = True,
) -> WatchdogSchedule:
    """Checkpoints from the circuit's markers and, for the CM, after every bus gate."""
    checkpoints = []
    for position, gate in enumerate(circuit.gates):
        qubits: tuple[int, ...] = ()
        include_cm = cm_after_bus_gates and gate.kind.uses_bus
        label = "cm" if include_cm else ""
        if work_markers and gate.checkpoint is not None:
            qubits = gate.checkpoint.qubits
            include_cm = include_cm or gate.checkpoint.include_cm
            label = gate.checkpoint.label or label
        if qubits or include_cm:
            checkpoints.append(
                Checkpoint(position=position, qubits=qubits, include_cm=include_cm, label=label)
            )
    schedule = WatchdogSchedule(checkpoints=tuple(checkpoints))
    logger.debug("Watchdog schedule has %d checkpoints", len(schedule))
    return schedule


def _validate(circuit: Circuit, schedule: WatchdogSchedule) -> None:
    for checkpoint in schedule.checkpoints:
        if checkpoint.position >= len(circuit.gates):
            raise UsageError(
                "checkpoint position beyond the end of the circuit",
                context={"position": checkpoint.position, "gates": len(circuit.gates)},
            )
        for q in checkpoint.qubits:
            if q >= circuit.n_qubits:
                raise UsageError("checkpoint qubit out of range", context={"qubit": q})


def _project_zero(state: QuantumState, checkpoint: Checkpoint) -> float:
    """Project the checkpoint's qubits onto |0⟩ in place; joint branch probability."""
    probability = 1.0
    targets = list(checkpoint.qubits)
    if checkpoint.include_cm:
        targets.append(statevec.CM)
    for ion in targets:
        p, _ = statevec.project_qubit(state, ion, 0, inplace=True)
        probability *= p
    return probability


def _resolve_rng(noise: NoiseModel | None, rng: RunRng | None) -> RunRng | None:
    if rng is None and noise is not None:
        return derive_run_rng(noise, 0)
    return rng


def _supervise(
    circuit: Circuit,
    schedule: WatchdogSchedule,
    rng: RunRng | None,
    oracle: IdealOracle,
    mode: WatchdogMode,
    keep_state: bool,
) -> WatchdogOutcome:
    _validate(circuit, schedule)
    oracle.reset()
    checkpoints = schedule.by_position()
    state = QuantumState.zero(circuit.n_qubits)
    probabilities: list[float] = []
    cumulative: list[float] = []
    survival = 1.0
    aborted = False

    for position, gate in enumerate(circuit.gates):
        execute(state, lower_gate(gate), rng=rng)
        oracle.advance(gate)
        checkpoint = checkpoints.get(position)
        if checkpoint is None:
            continue
        if mode is WatchdogMode.PROJECT:
            ideal = oracle.state_at_checkpoint()
            p = fidelity(state, ideal)
            state = ideal.copy()
        else:
            try:
                p = _project_zero(state, checkpoint)
            except ImpossibleOutcomeError:
                logger.warning(
                    "Correct branch has zero probability at gate %d (%s)",
                    position,
                    checkpoint.label,
                )
                p = 0.0
        survival *= p
        probabilities.append(p)
        cumulative.append(survival)
        logger.debug("Checkpoint %s at gate %d: p=%.12f", checkpoint.label, position, p)
        if p == 0.0:
            aborted = True
            break

    terminal = 0.0 if aborted else fidelity(state, oracle.terminal())
    return WatchdogOutcome(
        mode=mode,
        probabilities=tuple(probabilities),
        cumulative=tuple(cumulative),
        terminal_fidelity=terminal,
        aborted=aborted,
        final_state=state if keep_state and not aborted else None,
    )


def run_with_watchdog(
    circuit: Circuit,
    schedule: WatchdogSchedule,
    noise: NoiseModel | None,
    rng: RunRng | None,
    ideal_oracle: IdealOracle,
    keep_state: bool = True,
) -> WatchdogOutcome:
    """Noisy run post-selected on the all-|0⟩ branch at every checkpoint.

    An empty schedule gives plain noisy execution.
    """
    mode = WatchdogMode.PARTIAL if len(schedule) else WatchdogMode.OFF
    return _supervise(circuit, schedule, _resolve_rng(noise, rng), ideal_oracle, mode, keep_state)


def run_with_full_projection(
    circuit: Circuit,
    schedule: WatchdogSchedule,
    noise: NoiseModel | None,
    rng: RunRng | None,
    ideal_oracle: IdealOracle,
    keep_state: bool = True,
) -> WatchdogOutcome:
    """Noisy run reset onto the ideal state at every checkpoint.

    ``ideal_oracle`` must provide intermediate states, e.g. a :class:`NoiselessTrajectory`.
    """
    return _supervise(
        circuit,
        schedule,
        _resolve_rng(noise, rng),
        ideal_oracle,
        WatchdogMode.PROJECT,
        keep_state,
    )


def ideal_watchdog_estimate(k: int, theta: float) -> float:
    """Probability cos^{2k}θ of staying in |0⟩ when watched after each of k rotations by θ."""
    if k < 0:
        raise UsageError("k must be non-negative", context={"k": k})
    return math.cos(theta) ** (2 * k)


def unwatched_probability(k: int, theta: float) -> float:
    """cos²(kθ): the same k rotations without intermediate measurement."""
    if k < 0:
        raise UsageError("k must be non-negative", context={"k": k})
    return math.cos(k * theta) ** 2


def independent_qubit_watchdog_estimate(
    n_t: int,
    n_cm: int,
    l: int,  # noqa: E741
    eps_bar: float,
) -> float:
    """cos^{2(n_t + n_cm)}(ε̄): l qubits watched after each of their n_t/l pulses, CM after each of n_cm."""
    if l < 1 or n_t < 0 or n_cm < 0:
        raise UsageError("invalid pulse counts", context={"n_t": n_t, "n_cm": n_cm, "l": l})
    per_qubit = ideal_watchdog_estimate(1, eps_bar) ** (n_t / l)
    return per_qubit**l * ideal_watchdog_estimate(n_cm, eps_bar)
