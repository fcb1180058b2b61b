"""Pytest fixtures for the phasedrift tests."""

import math

import numpy as np
import pytest

from phasedrift import ExperimentConfig, FactoringInstance, NoiseModel, QuantumState


@pytest.fixture
def rng():
    """Seeded numpy generator for random test inputs."""
    return np.random.default_rng(20240611)


@pytest.fixture
def small_instance():
    """n=5, y=2, q=32: a 13-qubit layout small enough for exhaustive checks."""
    return FactoringInstance(n=5, y=2, q_bits=5)


@pytest.fixture
def tiny_instance():
    """n=3, y=2, q=16: a 10-qubit layout."""
    return FactoringInstance(n=3, y=2, q_bits=4)


@pytest.fixture
def instance():
    """The n=15, y=7, q=256 instance on 18 ions."""
    return FactoringInstance()


@pytest.fixture
def noise_model():
    """A moderately noisy model."""
    return NoiseModel(sigma=0.01, mean_eps=0.0, master_seed=2718)


@pytest.fixture
def small_config(tmp_path):
    """Fast experiment configuration on the n=5 instance."""
    return ExperimentConfig(
        n=5,
        y=2,
        q_bits=5,
        sigmas=(0.0, 0.01),
        runs=3,
        out_dir=tmp_path / "out",
    )


@pytest.fixture
def random_state(rng):
    """Factory for normalized random states over n qubits."""

    def make(n_qubits: int) -> QuantumState:
        dim = 1 << (n_qubits + 1)
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        amps /= np.linalg.norm(amps)
        return QuantumState(n_qubits, amps)

    return make


@pytest.fixture
def assert_up_to_phase():
    """Assert two amplitude vectors agree up to one global phase."""

    def check(actual, expected, atol=1e-10):
        actual = np.asarray(actual)
        expected = np.asarray(expected)
        pivot = int(np.argmax(np.abs(expected)))
        assert abs(expected[pivot]) > 0
        phase = actual[pivot] / expected[pivot]
        assert math.isclose(abs(phase), 1.0, abs_tol=atol)
        np.testing.assert_allclose(actual, phase * expected, atol=atol)

    return check
