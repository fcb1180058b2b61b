"""Tests for fidelity, entropy and the closed-form estimates."""

import math

import numpy as np
import pytest

from phasedrift.circuit import compile_circuit
from phasedrift.exceptions import DimensionMismatchError, UsageError
from phasedrift.metrics import (
    error_exposure,
    fidelity,
    finite_ensemble_entropy,
    linear_entropy_estimate,
    linear_entropy_mc,
    mean_fidelity_estimate,
    mean_fidelity_systematic_estimate,
    overlap_matrix,
    peak_contrast,
    peak_weight,
    pulse_sensitivity,
    purity_from_overlaps,
    summarize_ensemble,
    total_variation_from_uniform,
)
from phasedrift.models.noise import NoiseModel
from phasedrift.models.pulse import Pulse, PulseKind
from phasedrift.noise import derive_run_rng
from phasedrift.pulse import apply_pulse, execute
from phasedrift.shor import analytic_pc, build_modexp_circuit
from phasedrift.statevec import QuantumState

N_T, N_CM, L = 15_000, 10_000, 18


class TestFidelity:
    """Tests for the state fidelity."""

    def test_self_fidelity(self, random_state):
        """Test F(ψ, ψ) = 1."""
        state = random_state(3)
        assert fidelity(state, state) == pytest.approx(1.0)

    def test_global_phase_ignored(self, random_state):
        """Test F is insensitive to a global phase."""
        state = random_state(2)
        rotated = QuantumState(2, state.amplitudes * np.exp(1j * 0.7))
        assert fidelity(state, rotated) == pytest.approx(1.0)

    def test_orthogonal(self):
        """Test F = 0 for orthogonal basis states."""
        assert fidelity(QuantumState.basis(2, 0), QuantumState.basis(2, 3)) == 0.0

    def test_clipped(self):
        """Test round-off above one is clipped."""
        amps = np.zeros(8, dtype=complex)
        amps[0] = 1.0 + 1e-12
        state = QuantumState(2, amps)
        assert fidelity(state, state) == 1.0

    def test_dimension_mismatch(self):
        """Test states of different width are rejected."""
        with pytest.raises(DimensionMismatchError):
            fidelity(QuantumState.zero(2), QuantumState.zero(3))


class TestMeanFidelityEstimate:
    """Tests for the independent-qubit fidelity estimate."""

    def test_reference_value(self):
        """Test the value at n_t=1.5e4, n_cm=1e4, l=18, σ=0.01."""
        assert mean_fidelity_estimate(N_T, N_CM, L, 0.01) == pytest.approx(0.1348, abs=1e-3)

    def test_noiseless(self):
        """Test σ=0 gives exactly one."""
        assert mean_fidelity_estimate(N_T, N_CM, L, 0.0) == 1.0

    def test_large_noise_limit(self):
        """Test the fully dephased limit (1/2)^(l+1)."""
        assert mean_fidelity_estimate(N_T, N_CM, L, 10.0) == pytest.approx(0.5 ** (L + 1))

    def test_monotone_in_sigma(self):
        """Test non-increase with σ."""
        values = [mean_fidelity_estimate(N_T, N_CM, L, s) for s in np.linspace(0, 0.05, 51)]
        assert all(a >= b for a, b in zip(values, values[1:], strict=False))

    def test_monotone_in_counts(self):
        """Test non-increase with n_t and n_cm."""
        base = mean_fidelity_estimate(N_T, N_CM, L, 0.005)
        assert mean_fidelity_estimate(2 * N_T, N_CM, L, 0.005) < base
        assert mean_fidelity_estimate(N_T, 2 * N_CM, L, 0.005) < base

    @pytest.mark.parametrize(
        ("n_t", "n_cm", "l", "sigma"),
        [(-1, 0, 18, 0.01), (1, -1, 18, 0.01), (1, 1, 0, 0.01), (1, 1, 18, -0.1)],
    )
    def test_invalid_arguments(self, n_t, n_cm, l, sigma):  # noqa: E741
        """Test argument validation."""
        with pytest.raises(UsageError):
            mean_fidelity_estimate(n_t, n_cm, l, sigma)


class TestSystematicEstimate:
    """Tests for the estimate with a systematic shift."""

    def test_reduces_to_random_estimate(self):
        """Test ε̄=0 matches the unbiased estimate."""
        assert mean_fidelity_systematic_estimate(N_T, N_CM, L, 0.0, 0.01) == pytest.approx(
            mean_fidelity_estimate(N_T, N_CM, L, 0.01)
        )

    def test_quarter_turn_per_qubit(self):
        """Test 2ε̄n_t/l = π/2 halves each qubit factor."""
        eps_bar = math.pi / 2 * L / (2 * N_T)
        value = mean_fidelity_systematic_estimate(N_T, 0, L, eps_bar, 0.0)
        assert value == pytest.approx(0.5**L)

    def test_systematic_only(self):
        """Test σ=0 with a small shift stays below one."""
        assert mean_fidelity_systematic_estimate(1000, 500, L, 1e-3, 0.0) < 1.0


class TestLinearEntropyEstimate:
    """Tests for the linear-entropy estimate."""

    def test_noiseless(self):
        """Test S=0 without noise."""
        assert linear_entropy_estimate(N_T, N_CM, L, 0.0) == 0.0

    def test_maximal(self):
        """Test the l+1 ceiling."""
        assert linear_entropy_estimate(N_T, N_CM, L, 10.0) == pytest.approx(L + 1)

    def test_monotone(self):
        """Test increase with σ."""
        values = [linear_entropy_estimate(N_T, N_CM, L, s) for s in (0.001, 0.0025, 0.005, 0.01)]
        assert values == sorted(values)
        assert 0 < values[0] < values[-1] < L + 1


class TestEnsembleEntropy:
    """Tests for the Monte-Carlo linear entropy."""

    def test_identical_states(self, random_state):
        """Test that copies of one state give zero entropy."""
        state = random_state(2)
        entropy = linear_entropy_mc([state, state.copy(), state.copy()])
        assert entropy == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_states(self):
        """Test two orthogonal states give one bit."""
        states = [QuantumState.basis(2, 0), QuantumState.basis(2, 1)]
        assert linear_entropy_mc(states) == pytest.approx(1.0)

    def test_overlap_matrix(self):
        """Test the Gram magnitudes."""
        plus = QuantumState(1, np.array([1, 0, 1, 0], dtype=complex) / math.sqrt(2))
        states = [QuantumState.basis(1, 0), plus, QuantumState.basis(1, 1)]
        matrix = overlap_matrix(states)
        np.testing.assert_allclose(np.diag(matrix), 1.0)
        assert matrix[0, 1] == pytest.approx(1 / math.sqrt(2))
        assert matrix[0, 2] == 0.0
        np.testing.assert_allclose(matrix, matrix.T)

    def test_purity(self):
        """Test Tr ρ² of a two-state mixture."""
        matrix = np.array([[1.0, 0.5], [0.5, 1.0]])
        assert purity_from_overlaps(matrix) == pytest.approx(2.5 / 4)

    def test_needs_two_states(self):
        """Test that one state is not an ensemble."""
        with pytest.raises(UsageError):
            overlap_matrix([QuantumState.zero(1)])

    def test_mixed_widths(self):
        """Test that states of different width are rejected."""
        with pytest.raises(DimensionMismatchError):
            overlap_matrix([QuantumState.zero(1), QuantumState.zero(2)])

    def test_order_independent(self, random_state, rng):
        """Test that reordering the runs leaves the entropy unchanged."""
        states = [random_state(2) for _ in range(6)]
        shuffled = [states[i] for i in rng.permutation(len(states))]
        assert linear_entropy_mc(shuffled) == pytest.approx(linear_entropy_mc(states), rel=1e-12)


class TestFiniteEnsembleEntropy:
    """Tests for the M-run correction of the entropy estimate."""

    def test_single_run_is_pure(self):
        """Test one run has no entropy."""
        assert finite_ensemble_entropy(5.0, 1) == pytest.approx(0.0, abs=1e-15)

    def test_pure_ensemble(self):
        """Test zero ensemble entropy stays zero."""
        assert finite_ensemble_entropy(0.0, 40) == pytest.approx(0.0, abs=1e-15)

    def test_cap(self):
        """Test the log₂ M ceiling for a fully mixed ensemble."""
        assert finite_ensemble_entropy(200.0, 32) == pytest.approx(5.0)

    def test_large_ensemble_limit(self):
        """Test that many runs recover the ensemble entropy."""
        assert finite_ensemble_entropy(0.3, 10**9) == pytest.approx(0.3, rel=1e-6)

    def test_matches_orthogonal_runs(self):
        """Test four orthogonal runs against the Monte-Carlo entropy."""
        states = [QuantumState.basis(2, j) for j in range(4)]
        assert finite_ensemble_entropy(100.0, 4) == pytest.approx(linear_entropy_mc(states))

    def test_invalid(self):
        """Test the run count must be positive."""
        with pytest.raises(UsageError):
            finite_ensemble_entropy(0.1, 0)


def _rotated(state, kind, theta, phi):
    return apply_pulse(state.copy(), Pulse(kind=kind, ion=1, theta=theta, phi=phi))


class TestPulseSensitivity:
    """Tests for the per-pulse error generator variances."""

    @pytest.mark.parametrize("kind", [PulseKind.RESONANT, PulseKind.SIDEBAND])
    def test_small_angle_error(self, random_state, kind):
        """Test σ²·var_theta against a slightly over-rotated pulse."""
        before = random_state(3)
        theta, phi, delta = 0.7, 0.4, 1e-4
        after = _rotated(before, kind, theta, phi)
        var_theta, _ = pulse_sensitivity(after, Pulse(kind=kind, ion=1, theta=theta, phi=phi))
        infidelity = 1.0 - fidelity(_rotated(before, kind, theta + delta, phi), after)
        assert var_theta > 0.01
        assert infidelity == pytest.approx(delta**2 * var_theta, rel=1e-3)

    @pytest.mark.parametrize("kind", [PulseKind.RESONANT, PulseKind.SIDEBAND])
    def test_small_phase_error(self, random_state, kind):
        """Test σ²·var_phi against a pulse with a slightly shifted phase."""
        before = random_state(3)
        theta, phi, delta = 0.7, 0.4, 1e-4
        after = _rotated(before, kind, theta, phi)
        _, var_phi = pulse_sensitivity(after, Pulse(kind=kind, ion=1, theta=theta, phi=phi))
        infidelity = 1.0 - fidelity(_rotated(before, kind, theta, phi + delta), after)
        assert var_phi > 0.01
        assert infidelity == pytest.approx(delta**2 * var_phi, rel=1e-3)

    def test_from_ground_state(self):
        """Test a half transfer from |g⟩: var_theta = 1, var_phi = sin²θ cos²θ."""
        theta = math.pi / 4
        pulse = Pulse(kind=PulseKind.RESONANT, ion=0, theta=theta, phi=0.3)
        state = apply_pulse(QuantumState.zero(2), pulse)
        var_theta, var_phi = pulse_sensitivity(state, pulse)
        assert var_theta == pytest.approx(1.0)
        assert var_phi == pytest.approx(0.25)

    def test_phase_error_on_basis_state(self):
        """Test a full transfer from |g⟩ is insensitive to its phase."""
        pulse = Pulse(kind=PulseKind.RESONANT, ion=0, theta=math.pi / 2, phi=0.0)
        state = apply_pulse(QuantumState.zero(1), pulse)
        var_theta, var_phi = pulse_sensitivity(state, pulse)
        assert var_theta == pytest.approx(1.0)
        assert var_phi == pytest.approx(0.0, abs=1e-15)

    def test_idle_sideband(self):
        """Test a sideband pulse on |g⟩|0⟩_CM is insensitive to both errors."""
        pulse = Pulse(kind=PulseKind.SIDEBAND, ion=0, theta=math.pi / 2, phi=0.0)
        state = QuantumState.zero(2)
        assert pulse_sensitivity(state, pulse) == (0.0, 0.0)

    def test_auxiliary_pulse(self):
        """Test auxiliary pulses are rejected."""
        with pytest.raises(UsageError):
            pulse_sensitivity(QuantumState.zero(1), Pulse(kind=PulseKind.AUX_2PI, ion=0))


@pytest.fixture
def tiny_program(tiny_instance):
    return compile_circuit(build_modexp_circuit(tiny_instance, n_multipliers=2))


def _noisy_states(program, n_qubits, sigma, runs):
    noise = NoiseModel(sigma=sigma, master_seed=99)
    return [
        execute(QuantumState.zero(n_qubits), program, rng=derive_run_rng(noise, run))
        for run in range(runs)
    ]


class TestErrorExposure:
    """Tests for the exposure census against Monte-Carlo ensembles."""

    def test_census(self, tiny_program, tiny_instance):
        """Test pulse bookkeeping and the per-pulse bound of two."""
        exposure = error_exposure(tiny_program, tiny_instance.n_qubits)
        erroneous = [p for p in tiny_program if p.erroneous and not p.kind.auxiliary]
        assert exposure.n_resonant + exposure.n_sideband == len(erroneous)
        assert exposure.n_sideband == sum(p.kind is PulseKind.SIDEBAND for p in erroneous)
        assert 0.0 < exposure.total <= 2.0 * len(erroneous)
        assert exposure.n_t == exposure.resonant
        assert exposure.n_cm == exposure.sideband

    def test_initial_state_untouched(self, tiny_program, tiny_instance):
        """Test that the starting state is copied."""
        start = QuantumState.zero(tiny_instance.n_qubits)
        error_exposure(tiny_program, tiny_instance.n_qubits, initial=start)
        assert start.amplitudes[0] == 1.0

    @pytest.mark.parametrize("target", [0.03, 0.08])
    def test_fidelity_estimate_tracks_ensemble(self, tiny_program, tiny_instance, target):
        """Test the exposure-based estimate against 30 noisy runs."""
        n = tiny_instance.n_qubits
        exposure = error_exposure(tiny_program, n)
        sigma = math.sqrt(target / exposure.total)
        ideal = execute(QuantumState.zero(n), tiny_program)
        losses = np.array(
            [1.0 - fidelity(s, ideal) for s in _noisy_states(tiny_program, n, sigma, 30)]
        )
        estimate = 1.0 - mean_fidelity_estimate(exposure.n_t, exposure.n_cm, n, sigma)
        standard_error = losses.std(ddof=1) / math.sqrt(len(losses))
        assert abs(losses.mean() - estimate) <= 0.15 * estimate + 3.0 * standard_error

    @pytest.mark.parametrize("target", [0.03, 0.08])
    def test_entropy_estimate_tracks_ensemble(self, tiny_program, tiny_instance, target):
        """Test the finite-ensemble entropy estimate against the Monte-Carlo entropy."""
        n, runs = tiny_instance.n_qubits, 30
        exposure = error_exposure(tiny_program, n)
        sigma = math.sqrt(target / exposure.total)
        simulated = linear_entropy_mc(_noisy_states(tiny_program, n, sigma, runs))
        estimate = finite_ensemble_entropy(
            linear_entropy_estimate(exposure.n_t, exposure.n_cm, n, sigma), runs
        )
        assert simulated == pytest.approx(estimate, rel=0.25)


class TestSummarizeEnsemble:
    """Tests for summarize_ensemble."""

    def test_without_states(self):
        """Test a fidelity-only summary."""
        result = summarize_ensemble([0.9, 0.8, 0.7], sigma=0.01, mean_eps=0.0, n_t=10, n_cm=4)
        assert result.runs == 3
        assert result.mean_fidelity == pytest.approx(0.8)
        assert result.slin_mc is None

    def test_with_states(self):
        """Test that the recorded overlaps give the ensemble entropy."""
        states = [QuantumState.basis(2, 0), QuantumState.basis(2, 1)]
        result = summarize_ensemble([1.0, 0.0], 0.01, 0.0, 10, 4, states=states)
        assert result.slin_mc == pytest.approx(linear_entropy_mc(states))

    def test_single_state_has_no_entropy(self):
        """Test that one run records no overlaps."""
        result = summarize_ensemble([1.0], 0.0, 0.0, 10, 4, states=[QuantumState.zero(1)])
        assert result.pair_overlaps is None


class TestDistributionMeasures:
    """Tests for the P(c) flatness measures."""

    def test_ideal_distribution(self, instance):
        """Test q/r contrast and full peak weight for the ideal n=15 distribution."""
        pc = analytic_pc(instance)
        peaks = [0, 64, 128, 192]
        assert peak_weight(pc, peaks) == pytest.approx(1.0)
        assert peak_contrast(pc, peaks) == pytest.approx(64.0)
        assert total_variation_from_uniform(pc) == pytest.approx(0.984375)

    def test_flat_distribution(self):
        """Test contrast 1 and zero distance for a flat distribution."""
        flat = np.full(256, 1 / 256)
        assert peak_contrast(flat, [0, 64]) == pytest.approx(1.0)
        assert total_variation_from_uniform(flat) == pytest.approx(0.0)

    def test_empty_peaks(self):
        """Test that the contrast needs peaks."""
        with pytest.raises(UsageError):
            peak_contrast(np.ones(4) / 4, [])
