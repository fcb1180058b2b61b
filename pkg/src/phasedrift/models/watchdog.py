"""Watchdog schedule and outcome records."""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from phasedrift.statevec import QuantumState

_TOL = 1e-12


class WatchdogMode(str, Enum):
    """How a run is supervised."""

    OFF = "off"
    PARTIAL = "partial"
    PROJECT = "project"


class Checkpoint(BaseModel):
    """A measurement after gate ``position``: ``qubits`` (and the CM) onto |0⟩."""

    model_config = ConfigDict(frozen=True)

    position: int = Field(ge=0)
    qubits: tuple[int, ...] = ()
    include_cm: bool = True
    label: str = ""


class WatchdogSchedule(BaseModel):
    model_config = ConfigDict(frozen=True)

    checkpoints: tuple[Checkpoint, ...] = ()

    @model_validator(mode="after")
    def _check_order(self) -> WatchdogSchedule:
        positions = [c.position for c in self.checkpoints]
        if any(b <= a for a, b in zip(positions, positions[1:], strict=False)):
            raise ValueError("checkpoint positions must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.checkpoints)

    def by_position(self) -> dict[int, Checkpoint]:
        return {c.position: c for c in self.checkpoints}

    def truncated(self, count: int) -> WatchdogSchedule:
        """The first ``count`` checkpoints."""
        return WatchdogSchedule(checkpoints=self.checkpoints[:count])


class WatchdogOutcome(BaseModel):
    """Result of one supervised run.

    ``cumulative`` holds the running product of ``probabilities``. The
    watchdog fidelity is the survival times the terminal fidelity.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: WatchdogMode
    probabilities: tuple[float, ...] = ()
    cumulative: tuple[float, ...] = ()
    terminal_fidelity: float = Field(ge=0.0, le=1.0)
    aborted: bool = False
    final_state: QuantumState | None = None

    @model_validator(mode="after")
    def _check_products(self) -> WatchdogOutcome:
        if len(self.cumulative) != len(self.probabilities):
            raise ValueError("cumulative survival must have one entry per checkpoint")
        running = 1.0
        for p, c in zip(self.probabilities, self.cumulative, strict=True):
            if not -_TOL <= p <= 1.0 + _TOL:
                raise ValueError(f"checkpoint probability {p} outside [0, 1]")
            running *= p
            if not math.isclose(running, c, rel_tol=_TOL, abs_tol=_TOL):
                raise ValueError("cumulative survival is not the product of checkpoint values")
        return self

    @property
    def survival(self) -> float:
        return self.cumulative[-1] if self.cumulative else 1.0

    @property
    def watchdog_fidelity(self) -> float:
        return self.survival * self.terminal_fidelity

    @property
    def monotone(self) -> bool:
        """Whether every appended checkpoint left the survival unchanged or lower."""
        return all(b <= a + _TOL for a, b in zip(self.cumulative, self.cumulative[1:], strict=False))
