"""Pulse-level simulation of an ion-trap quantum computer factoring 15.

Shor's order finding is compiled to resonant, sideband and auxiliary laser
pulses, run on a dense state vector with Gaussian phase-drift noise, and
scored by fidelity, linear entropy and watchdog survival.

Example usage:
    from phasedrift import ExperimentConfig, ExperimentRunner

    config = ExperimentConfig(sigmas=(0.0, 0.005), runs=20)
    with ExperimentRunner(config) as runner:
        print(runner.pulse_counts)
        runner.run_fig2()

Working with the engine directly:
    from phasedrift import FactoringInstance, QuantumState, Stage
    from phasedrift import build_modexp_circuit, compile_circuit, execute, fidelity, ideal_state

    inst = FactoringInstance()
    program = compile_circuit(build_modexp_circuit(inst, n_multipliers=1))
    state = execute(QuantumState.zero(inst.n_qubits), program)
    fidelity(state, ideal_state(inst, Stage.PRE_FT, n_multipliers=1))
"""

from phasedrift.circuit import CircuitBuilder, compile_circuit, ideal_matrix, pulse_counts
from phasedrift.exceptions import (
    ArtifactWriteError,
    ConstructionError,
    DimensionMismatchError,
    ImpossibleOutcomeError,
    InconclusiveMeasurementError,
    InvariantViolationError,
    PhaseDriftError,
    QubitIndexError,
    RetryWithNewBaseError,
    UsageError,
)
from phasedrift.harness import (
    ExperimentRunner,
    run_fig1,
    run_fig2,
    run_operations_sweep,
    run_watchdog_study,
)
from phasedrift.metrics import (
    error_exposure,
    fidelity,
    linear_entropy_estimate,
    linear_entropy_mc,
    mean_fidelity_estimate,
    mean_fidelity_systematic_estimate,
)
from phasedrift.models import (
    BasisLabel,
    Circuit,
    CircuitMode,
    EnsembleResult,
    ErrorExposure,
    ExperimentConfig,
    FactoringInstance,
    Gate,
    GateKind,
    NoiseModel,
    Pulse,
    PulseCounts,
    PulseKind,
    PulseSequence,
    Stage,
    WatchdogMode,
    WatchdogOutcome,
    WatchdogSchedule,
)
from phasedrift.noise import RunRng, derive_run_rng, perturb
from phasedrift.pulse import cnot_gate, cz_gate, execute, single_qubit_rotation, toffoli_gate
from phasedrift.shor import (
    analytic_pc,
    build_factoring_circuit,
    build_modexp_circuit,
    build_qft_circuit,
    extract_order,
    factors_from_order,
    ideal_state,
)
from phasedrift.statevec import QuantumState, overlap, project_qubit, register_distribution
from phasedrift.watchdog import (
    ideal_watchdog_estimate,
    run_with_full_projection,
    run_with_watchdog,
    schedule_from_circuit,
)

__version__ = "0.1.0"

__all__ = [
    # Engine
    "QuantumState",
    "execute",
    "overlap",
    "project_qubit",
    "register_distribution",
    # Pulses and noise
    "RunRng",
    "cnot_gate",
    "cz_gate",
    "derive_run_rng",
    "perturb",
    "single_qubit_rotation",
    "toffoli_gate",
    # Compiler
    "CircuitBuilder",
    "compile_circuit",
    "ideal_matrix",
    "pulse_counts",
    # Factoring
    "analytic_pc",
    "build_factoring_circuit",
    "build_modexp_circuit",
    "build_qft_circuit",
    "extract_order",
    "factors_from_order",
    "ideal_state",
    # Metrics and watchdog
    "error_exposure",
    "fidelity",
    "ideal_watchdog_estimate",
    "linear_entropy_estimate",
    "linear_entropy_mc",
    "mean_fidelity_estimate",
    "mean_fidelity_systematic_estimate",
    "run_with_full_projection",
    "run_with_watchdog",
    "schedule_from_circuit",
    # Experiments
    "ExperimentRunner",
    "run_fig1",
    "run_fig2",
    "run_operations_sweep",
    "run_watchdog_study",
    # Exceptions
    "ArtifactWriteError",
    "ConstructionError",
    "DimensionMismatchError",
    "ImpossibleOutcomeError",
    "InconclusiveMeasurementError",
    "InvariantViolationError",
    "PhaseDriftError",
    "QubitIndexError",
    "RetryWithNewBaseError",
    "UsageError",
    # Models
    "BasisLabel",
    "Circuit",
    "CircuitMode",
    "EnsembleResult",
    "ErrorExposure",
    "ExperimentConfig",
    "FactoringInstance",
    "Gate",
    "GateKind",
    "NoiseModel",
    "Pulse",
    "PulseCounts",
    "PulseKind",
    "PulseSequence",
    "Stage",
    "WatchdogMode",
    "WatchdogOutcome",
    "WatchdogSchedule",
]
