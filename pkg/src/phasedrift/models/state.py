"""Basis-state labels for the ion register."""

from pydantic import BaseModel, ConfigDict, Field


class BasisLabel(BaseModel):
    """Names a computational basis state |qubit_bits⟩|cm⟩_CM.

    Bit k of ``qubit_bits`` is the state of ion k (0 = |g⟩, 1 = |e⟩).
    """

    model_config = ConfigDict(frozen=True)

    qubit_bits: int = Field(ge=0)
    cm: int = Field(default=0, ge=0, le=1)

    def index(self) -> int:
        """Amplitude index of this label (CM is the least-significant bit)."""
        return (self.qubit_bits << 1) | self.cm

    @classmethod
    def from_index(cls, index: int) -> "BasisLabel":
        """Decode an amplitude index."""
        return cls(qubit_bits=index >> 1, cm=index & 1)
