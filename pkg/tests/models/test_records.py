"""Tests for circuit, watchdog and ensemble records."""

import pytest
from pydantic import ValidationError

from phasedrift.models.circuit import CheckpointMark, Circuit, Gate, GateKind
from phasedrift.models.metrics import EnsembleResult, ErrorExposure
from phasedrift.models.watchdog import WatchdogMode, WatchdogOutcome


class TestGate:
    """Tests for Gate."""

    def test_arity(self):
        """Test operand counts per kind."""
        assert GateKind.TOFFOLI.arity == 3
        assert GateKind.CONTROLLED_PHASE.uses_bus
        assert not GateKind.HADAMARD.uses_bus
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.CNOT, qubits=(0,))

    def test_parameters_required(self):
        """Test rotations and phases need their angles."""
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.ROTATION, qubits=(0,), theta=1.0)
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.PHASE, qubits=(0,))

    def test_negative_qubit(self):
        """Test qubit indices are non-negative."""
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.X, qubits=(-1,))

    def test_inverse_of_self_inverse_gate(self):
        """Test CNOT is its own inverse."""
        gate = Gate(kind=GateKind.CNOT, qubits=(0, 1), checkpoint=CheckpointMark(qubits=(1,)))
        assert gate.inverse() == Gate(kind=GateKind.CNOT, qubits=(0, 1))

    def test_hashable(self):
        """Test equal gates hash equally."""
        a = Gate(kind=GateKind.CONTROLLED_PHASE, qubits=(0, 1), angle=0.5)
        b = Gate(kind=GateKind.CONTROLLED_PHASE, qubits=(0, 1), angle=0.5)
        assert hash(a) == hash(b)


class TestCircuit:
    """Tests for Circuit."""

    def test_gate_out_of_range(self):
        """Test gates must address existing qubits."""
        with pytest.raises(ValidationError):
            Circuit(n_qubits=2, gates=(Gate(kind=GateKind.X, qubits=(2,)),))

    def test_register_out_of_range(self):
        """Test registers must lie inside the circuit."""
        with pytest.raises(ValidationError):
            Circuit(n_qubits=2, registers={"r": (0, 5)})


class TestWatchdogOutcome:
    """Tests for WatchdogOutcome."""

    def test_survival(self):
        """Test survival and the watchdog fidelity as survival times overlap."""
        outcome = WatchdogOutcome(
            mode=WatchdogMode.PARTIAL,
            probabilities=(0.9, 0.5),
            cumulative=(0.9, 0.45),
            terminal_fidelity=0.8,
        )
        assert outcome.survival == pytest.approx(0.45)
        assert outcome.watchdog_fidelity == pytest.approx(0.36)
        assert outcome.monotone

    def test_no_checkpoints(self):
        """Test the unsupervised fallback to the terminal fidelity."""
        outcome = WatchdogOutcome(mode=WatchdogMode.OFF, terminal_fidelity=0.7)
        assert outcome.survival == 1.0
        assert outcome.watchdog_fidelity == 0.7

    def test_cumulative_must_be_product(self):
        """Test the running-product validator."""
        with pytest.raises(ValidationError):
            WatchdogOutcome(
                mode=WatchdogMode.PARTIAL,
                probabilities=(0.9, 0.5),
                cumulative=(0.9, 0.5),
                terminal_fidelity=0.8,
            )

    def test_lengths_must_match(self):
        """Test one cumulative entry per checkpoint."""
        with pytest.raises(ValidationError):
            WatchdogOutcome(
                mode=WatchdogMode.PARTIAL,
                probabilities=(0.9,),
                cumulative=(),
                terminal_fidelity=0.8,
            )


class TestEnsembleResult:
    """Tests for EnsembleResult."""

    def test_statistics(self):
        """Test mean, population deviation and standard error."""
        result = EnsembleResult(sigma=0.01, fidelities=(0.5, 0.7), n_t=10, n_cm=4)
        assert result.mean_fidelity == pytest.approx(0.6)
        assert result.fidelity_std == pytest.approx(0.1)
        assert result.standard_error == pytest.approx(0.1)

    def test_deterministic(self):
        """Test identical runs have exactly zero spread."""
        result = EnsembleResult(sigma=0.0, fidelities=(0.3, 0.3, 0.3), n_t=10, n_cm=4)
        assert result.deterministic
        assert result.mean_fidelity == 0.3
        assert result.fidelity_std == 0.0

    def test_entropy_from_overlaps(self):
        """Test S = −log₂ of the mixture purity."""
        result = EnsembleResult(
            sigma=0.01,
            fidelities=(0.5, 0.5),
            pair_overlaps=((1.0, 0.0), (0.0, 1.0)),
            n_t=10,
            n_cm=4,
        )
        assert result.slin_mc == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "overlaps",
        [
            ((1.0, 0.2),),  # not square
            ((0.9, 0.2), (0.2, 1.0)),  # diagonal not one
            ((1.0, 1.5), (1.5, 1.0)),  # magnitude above one
        ],
    )
    def test_invalid_overlaps(self, overlaps):
        """Test overlap-matrix validation."""
        with pytest.raises(ValidationError):
            EnsembleResult(sigma=0.01, fidelities=(0.5, 0.5), pair_overlaps=overlaps, n_t=1, n_cm=1)

    def test_fidelity_range(self):
        """Test fidelities must lie in [0, 1]."""
        with pytest.raises(ValidationError):
            EnsembleResult(sigma=0.01, fidelities=(1.2,), n_t=1, n_cm=1)

    def test_fractional_counts(self):
        """Test the estimates accept exposure-weighted counts."""
        result = EnsembleResult(sigma=0.01, fidelities=(0.9,), n_t=12.5, n_cm=3.25)
        assert result.n_t == 12.5


class TestErrorExposure:
    """Tests for ErrorExposure."""

    def test_totals(self):
        """Test the resonant and sideband parts map onto n_t and n_cm."""
        exposure = ErrorExposure(resonant=7.5, sideband=2.0, n_resonant=10, n_sideband=4)
        assert exposure.total == pytest.approx(9.5)
        assert exposure.n_t == 7.5
        assert exposure.n_cm == 2.0

    def test_non_negative(self):
        """Test negative exposure is rejected."""
        with pytest.raises(ValidationError):
            ErrorExposure(resonant=-1.0, sideband=0.0)
