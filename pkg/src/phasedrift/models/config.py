"""Experiment configuration."""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from phasedrift.models.noise import NoiseModel
from phasedrift.models.shor import FactoringInstance
from phasedrift.models.watchdog import WatchdogMode

FIG2_SIGMAS: tuple[float, ...] = (0.0, 0.001, 0.0025, 0.005, 0.01, 0.02)
FIG1_SIGMAS: tuple[float, ...] = (*FIG2_SIGMAS, 0.05)
WATCHDOG_SIGMAS: tuple[float, ...] = (0.0, 0.001)
OPERATIONS_SIGMAS: tuple[float, ...] = (0.005,)
WATCHDOG_MEAN_EPS_RATIO = 1.1
WATCHDOG_MULTIPLIERS = 3
DEFAULT_SEED = 2718

_TRUNCATED = re.compile(r"^truncated:(\d+)$")


class CircuitMode(BaseModel):
    """Which factoring circuit to simulate: ``full``, ``optimized`` or ``truncated:K``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["full", "optimized", "truncated"] = "full"
    multipliers: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_multipliers(self) -> CircuitMode:
        if (self.kind == "truncated") != (self.multipliers is not None):
            raise ValueError("exactly the truncated mode takes a multiplier count")
        return self

    @classmethod
    def parse(cls, text: str) -> CircuitMode:
        text = text.strip().lower()
        if text in ("full", "optimized"):
            return cls(kind=text)  # type: ignore[arg-type]
        match = _TRUNCATED.match(text)
        if match is None:
            raise ValueError(f"unknown circuit mode {text!r}; use full, optimized or truncated:K")
        return cls(kind="truncated", multipliers=int(match.group(1)))

    @property
    def optimized(self) -> bool:
        return self.kind == "optimized"

    def n_multipliers(self, inst: FactoringInstance) -> int:
        return self.multipliers if self.multipliers is not None else inst.q_bits

    def __str__(self) -> str:
        return f"truncated:{self.multipliers}" if self.kind == "truncated" else self.kind


class ExperimentConfig(BaseModel):
    """Everything one experiment invocation needs; picklable for worker processes.

    Example:
        config = ExperimentConfig(sigmas=(0.0, 0.01), runs=20, out_dir=Path("out"))
        config.noise_model(0.01)
    """

    model_config = ConfigDict(frozen=True)

    n: int = 15
    y: int = 7
    q_bits: int = 8
    sigmas: tuple[float, ...] = FIG2_SIGMAS
    mean_eps: float | None = None
    mean_eps_ratio: float | None = None
    runs: int = Field(default=20, ge=1)
    master_seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    circuit: CircuitMode = Field(default_factory=CircuitMode)
    watchdog: WatchdogMode = WatchdogMode.OFF
    out_dir: Path = Path("results")
    jobs: int = Field(default=1, ge=1)
    l: int = Field(default=18, ge=1)  # noqa: E741
    dump_pulses: bool = False
    dump_state: bool = False
    shots: int = Field(default=0, ge=0)

    @field_validator("circuit", mode="before")
    @classmethod
    def _parse_circuit(cls, value: object) -> object:
        return CircuitMode.parse(value) if isinstance(value, str) else value

    @field_validator("sigmas")
    @classmethod
    def _check_sigmas(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not value:
            raise ValueError("at least one sigma is required")
        for sigma in value:
            if not math.isfinite(sigma) or sigma < 0:
                raise ValueError(f"sigma values must be finite and non-negative, got {sigma}")
        return value

    @field_validator("out_dir")
    @classmethod
    def _check_out_dir(cls, value: Path) -> Path:
        if value.exists() and not value.is_dir():
            raise ValueError(f"output path {value} exists and is not a directory")
        return value

    @model_validator(mode="after")
    def _check_noise(self) -> ExperimentConfig:
        if self.mean_eps is not None and self.mean_eps_ratio is not None:
            raise ValueError("give either mean_eps or mean_eps_ratio, not both")
        for value in (self.mean_eps, self.mean_eps_ratio):
            if value is not None and not math.isfinite(value):
                raise ValueError("systematic shift must be finite")
        self.instance()
        if self.circuit.multipliers is not None and self.circuit.multipliers > self.q_bits:
            raise ValueError(
                f"truncated:{self.circuit.multipliers} exceeds the {self.q_bits} exponent qubits"
            )
        return self

    @classmethod
    def for_watchdog_study(cls, **overrides: object) -> ExperimentConfig:
        """Defaults of the watchdog study: 3 multipliers, ε̄ = 1.1σ."""
        values: dict[str, object] = {
            "sigmas": WATCHDOG_SIGMAS,
            "circuit": CircuitMode(kind="truncated", multipliers=WATCHDOG_MULTIPLIERS),
        }
        if "mean_eps" not in overrides:
            values["mean_eps_ratio"] = WATCHDOG_MEAN_EPS_RATIO
        values.update(overrides)
        return cls.model_validate(values)

    def instance(self) -> FactoringInstance:
        return FactoringInstance(n=self.n, y=self.y, q_bits=self.q_bits)

    def mean_eps_for(self, sigma: float) -> float:
        if self.mean_eps_ratio is not None:
            return self.mean_eps_ratio * sigma
        return self.mean_eps if self.mean_eps is not None else 0.0

    def noise_model(self, sigma: float) -> NoiseModel:
        return NoiseModel(sigma=sigma, mean_eps=self.mean_eps_for(sigma), master_seed=self.master_seed)
