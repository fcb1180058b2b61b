"""Pulse instruction models.

Angles follow the Rabi-evolution matrix

    U = [[cos θ, -i e^{-iφ} sin θ], [-i e^{iφ} sin θ, cos θ]]

with θ = Ωt. Full population transfer (a "π-pulse" in Rabi-area language) is
θ = π/2; a "π/2-pulse" is θ = π/4.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from enum import Enum
from functools import cached_property

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

TWO_PI = 2.0 * math.pi


class PulseKind(str, Enum):
    """Kinds of laser pulse understood by the executor."""

    RESONANT = "resonant"
    SIDEBAND = "sideband"
    AUX_2PI = "aux2pi"
    AUX_PHASE = "auxphase"

    @property
    def auxiliary(self) -> bool:
        return self in (PulseKind.AUX_2PI, PulseKind.AUX_PHASE)


class Pulse(BaseModel):
    """A single laser pulse addressed to one ion."""

    model_config = ConfigDict(frozen=True)

    kind: PulseKind
    ion: int = Field(ge=0)
    theta: float | None = None
    phi: float | None = None
    erroneous: bool = True

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, data: object) -> object:
        if not isinstance(data, dict):
            return data
        kind = PulseKind(data.get("kind"))
        data = dict(data)
        if kind.auxiliary:
            data["erroneous"] = False
            data["theta"] = None
            if kind is PulseKind.AUX_2PI:
                data["phi"] = None
        phi = data.get("phi")
        if phi is not None:
            data["phi"] = float(phi) % TWO_PI
        return data

    @model_validator(mode="after")
    def _check_angles(self) -> Pulse:
        if self.kind in (PulseKind.RESONANT, PulseKind.SIDEBAND):
            if self.theta is None or self.phi is None:
                raise ValueError(f"{self.kind.value} pulse needs theta and phi")
            if not math.isfinite(self.theta) or not math.isfinite(self.phi):
                raise ValueError("pulse angles must be finite")
        if self.kind is PulseKind.AUX_PHASE and (self.phi is None or not math.isfinite(self.phi)):
            raise ValueError("auxphase pulse needs a finite conditional phase")
        return self

    @classmethod
    def resonant(cls, ion: int, theta: float, phi: float) -> Pulse:
        return cls(kind=PulseKind.RESONANT, ion=ion, theta=theta, phi=phi)

    @classmethod
    def sideband(cls, ion: int, theta: float, phi: float) -> Pulse:
        return cls(kind=PulseKind.SIDEBAND, ion=ion, theta=theta, phi=phi)

    @classmethod
    def aux_2pi(cls, ion: int) -> Pulse:
        return cls(kind=PulseKind.AUX_2PI, ion=ion)

    @classmethod
    def aux_phase(cls, ion: int, phase: float) -> Pulse:
        return cls(kind=PulseKind.AUX_PHASE, ion=ion, phi=phase)

    def to_line(self) -> str:
        """Render as ``kind,ion,theta,phi,erroneous`` with 17 significant digits."""
        theta = "" if self.theta is None else format(self.theta, ".17g")
        phi = "" if self.phi is None else format(self.phi, ".17g")
        return f"{self.kind.value},{self.ion},{theta},{phi},{str(self.erroneous).lower()}"


class PulseSequence(BaseModel):
    """An ordered, immutable list of pulses with per-kind tallies."""

    model_config = ConfigDict(frozen=True)

    pulses: tuple[Pulse, ...] = ()

    @computed_field  # type: ignore[prop-decorator]
    @cached_property
    def n_resonant(self) -> int:
        return sum(1 for p in self.pulses if p.kind is PulseKind.RESONANT)

    @computed_field  # type: ignore[prop-decorator]
    @cached_property
    def n_sideband(self) -> int:
        return sum(1 for p in self.pulses if p.kind is PulseKind.SIDEBAND)

    @computed_field  # type: ignore[prop-decorator]
    @cached_property
    def n_aux(self) -> int:
        return sum(1 for p in self.pulses if p.kind.auxiliary)

    @classmethod
    def of(cls, *pulses: Pulse) -> PulseSequence:
        return cls(pulses=pulses)

    @classmethod
    def concat(cls, sequences: Iterable[PulseSequence]) -> PulseSequence:
        pulses: list[Pulse] = []
        for seq in sequences:
            pulses.extend(seq.pulses)
        return cls(pulses=tuple(pulses))

    def __add__(self, other: PulseSequence) -> PulseSequence:
        return PulseSequence(pulses=self.pulses + other.pulses)

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self) -> Iterator[Pulse]:  # type: ignore[override]
        return iter(self.pulses)

    def __getitem__(self, index: int) -> Pulse:
        return self.pulses[index]

    def dump_lines(self) -> list[str]:
        """Audit dump, one ``kind,ion,theta,phi,erroneous`` line per pulse."""
        return [pulse.to_line() for pulse in self.pulses]


class PulseCounts(BaseModel):
    """Pulse tallies of a sequence; erroneous pulses are the resonant and sideband ones."""

    model_config = ConfigDict(frozen=True)

    n_resonant: int = Field(default=0, ge=0)
    n_sideband: int = Field(default=0, ge=0)
    n_aux: int = Field(default=0, ge=0)

    @property
    def n_erroneous(self) -> int:
        return self.n_resonant + self.n_sideband

    @property
    def n_total(self) -> int:
        return self.n_erroneous + self.n_aux

    @property
    def erroneous_fraction(self) -> float:
        return self.n_erroneous / self.n_total if self.n_total else 0.0

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        """``(n_resonant, n_sideband, n_aux, n_erroneous, n_total)``."""
        return (self.n_resonant, self.n_sideband, self.n_aux, self.n_erroneous, self.n_total)

    def __add__(self, other: PulseCounts) -> PulseCounts:
        return PulseCounts(
            n_resonant=self.n_resonant + other.n_resonant,
            n_sideband=self.n_sideband + other.n_sideband,
            n_aux=self.n_aux + other.n_aux,
        )
