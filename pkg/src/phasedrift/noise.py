"""Gaussian phase-drift perturbation with deterministic per-run streams."""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt

from phasedrift.exceptions import UsageError
from phasedrift.models.noise import NoiseModel
from phasedrift.models.pulse import Pulse

logger = logging.getLogger(__name__)


class RunRng:
    """Gaussian stream of one Monte-Carlo run.

    Backed by PCG64 seeded from ``SeedSequence(master_seed, spawn_key=(run_index,))``;
    draws use ``Generator.normal``. ``draws`` counts the Gaussian samples consumed.
    """

    def __init__(self, model: NoiseModel, run_index: int) -> None:
        if run_index < 0:
            raise UsageError("run index must be non-negative", context={"run_index": run_index})
        self.model = model
        self.run_index = run_index
        seed_seq = np.random.SeedSequence(entropy=model.master_seed, spawn_key=(run_index,))
        self._generator = np.random.Generator(np.random.PCG64(seed_seq))
        self.draws = 0

    def normal(self) -> float:
        """One draw from Normal(mean_eps, sigma²)."""
        self.draws += 1
        return float(self._generator.normal(self.model.mean_eps, self.model.sigma))

    def normals(self, count: int) -> npt.NDArray[np.float64]:
        self.draws += count
        return self._generator.normal(self.model.mean_eps, self.model.sigma, size=count)

    def __repr__(self) -> str:
        return f"RunRng(run_index={self.run_index}, draws={self.draws})"


def derive_run_rng(model: NoiseModel, run_index: int) -> RunRng:
    """Independent, reproducible stream for run ``run_index`` of ``model``."""
    return RunRng(model, run_index)


def perturb(pulse: Pulse, rng: RunRng) -> tuple[float, float]:
    """Effective (θ, φ) of an erroneous pulse: θ + ε_θ, φ + ε_φ.

    Consumes exactly two draws, θ first.
    """
    if not pulse.erroneous or pulse.theta is None or pulse.phi is None:
        raise UsageError(
            "only erroneous pulses can be perturbed",
            context={"kind": pulse.kind.value, "ion": pulse.ion},
        )
    eps_theta = rng.normal()
    eps_phi = rng.normal()
    return pulse.theta + eps_theta, pulse.phi + eps_phi
