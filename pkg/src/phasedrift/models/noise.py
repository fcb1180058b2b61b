"""Noise model for phase-drift errors."""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator


class NoiseModel(BaseModel):
    """Gaussian over/under-rotation model.

    Every erroneous pulse has its angle θ and phase φ shifted by independent
    draws from Normal(mean_eps, sigma²). Both are in radians of θ = Ωt.
    """

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=0.0, ge=0.0)
    mean_eps: float = 0.0
    master_seed: int = Field(default=2718, ge=0, lt=2**64)

    @field_validator("sigma", "mean_eps")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("noise parameters must be finite")
        return value

    @property
    def noiseless(self) -> bool:
        return self.sigma == 0.0 and self.mean_eps == 0.0

    @classmethod
    def with_mean_ratio(cls, sigma: float, ratio: float, master_seed: int = 2718) -> NoiseModel:
        """Model with systematic shift ``ratio * sigma``."""
        return cls(sigma=sigma, mean_eps=ratio * sigma, master_seed=master_seed)
