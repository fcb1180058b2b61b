"""Ensemble statistics records."""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

_TOL = 1e-9


class EnsembleResult(BaseModel):
    """Per-run results of one noise ensemble and the circuit parameters behind them.

    ``pair_overlaps`` holds |⟨ψ_i|ψ_j⟩| for every ordered pair of final states
    when the linear entropy was requested. ``n_t`` and ``n_cm`` are the
    counts fed to the closed-form estimates, usually from :class:`ErrorExposure`.
    """

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(ge=0.0)
    mean_eps: float = 0.0
    fidelities: tuple[float, ...] = Field(min_length=1)
    pair_overlaps: tuple[tuple[float, ...], ...] | None = None
    n_t: float = Field(ge=0.0)
    n_cm: float = Field(ge=0.0)
    l: int = Field(default=18, ge=1)  # noqa: E741

    @field_validator("fidelities")
    @classmethod
    def _fidelities_in_range(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        for f in value:
            if not -_TOL <= f <= 1.0 + _TOL:
                raise ValueError(f"fidelity {f} outside [0, 1]")
        return value

    @model_validator(mode="after")
    def _check_overlaps(self) -> EnsembleResult:
        if self.pair_overlaps is None:
            return self
        m = len(self.pair_overlaps)
        if m != len(self.fidelities):
            raise ValueError("overlap matrix size must match the number of runs")
        for i, row in enumerate(self.pair_overlaps):
            if len(row) != m:
                raise ValueError("overlap matrix must be square")
            if abs(row[i] - 1.0) > _TOL:
                raise ValueError(f"overlap diagonal entry {i} is {row[i]}, expected 1")
            if any(not -_TOL <= v <= 1.0 + _TOL for v in row):
                raise ValueError("overlap magnitudes must lie in [0, 1]")
        return self

    @property
    def runs(self) -> int:
        return len(self.fidelities)

    @property
    def deterministic(self) -> bool:
        """Whether every run produced the same fidelity."""
        return max(self.fidelities) == min(self.fidelities)

    @property
    def mean_fidelity(self) -> float:
        if self.deterministic:
            return self.fidelities[0]
        return math.fsum(self.fidelities) / self.runs

    @property
    def fidelity_std(self) -> float:
        """Population standard deviation of the per-run fidelities."""
        if self.deterministic:
            return 0.0
        mean = self.mean_fidelity
        return math.sqrt(math.fsum((f - mean) ** 2 for f in self.fidelities) / self.runs)

    @property
    def standard_error(self) -> float:
        if self.runs < 2 or self.deterministic:
            return 0.0
        mean = self.mean_fidelity
        sample_var = math.fsum((f - mean) ** 2 for f in self.fidelities) / (self.runs - 1)
        return math.sqrt(sample_var / self.runs)

    @property
    def slin_mc(self) -> float | None:
        """Linear entropy −log₂ Tr ρ² of the ensemble, if overlaps were recorded."""
        if self.pair_overlaps is None:
            return None
        m = len(self.pair_overlaps)
        purity = math.fsum(v * v for row in self.pair_overlaps for v in row) / (m * m)
        return max(0.0, -math.log2(min(purity, 1.0)))


class ErrorExposure(BaseModel):
    """First-order sensitivity of a pulse program to angle and phase errors.

    For each erroneous pulse the variance of its θ and φ error generators is
    taken on the noiseless state right after the pulse. With independent
    N(0, σ²) errors the mean infidelity is σ²·(resonant + sideband) to lowest
    order. A pulse that fully exposes one qubit contributes 1, so the sums
    stand in for n_t and n_cm in the independent-qubit estimates.
    """

    model_config = ConfigDict(frozen=True)

    resonant: float = Field(ge=0.0)
    sideband: float = Field(ge=0.0)
    n_resonant: int = Field(default=0, ge=0)
    n_sideband: int = Field(default=0, ge=0)

    @property
    def total(self) -> float:
        return self.resonant + self.sideband

    @property
    def n_t(self) -> float:
        """Qubit exposure used in place of the erroneous-pulse count."""
        return self.resonant

    @property
    def n_cm(self) -> float:
        return self.sideband
