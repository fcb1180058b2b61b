"""Factoring instance and measurement records."""

from __future__ import annotations

import math
from enum import Enum
from functools import cached_property

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class Stage(str, Enum):
    """Where in the algorithm an ideal state is taken."""

    PRE_FT = "pre_ft"
    POST_FT = "post_ft"


class FactoringInstance(BaseModel):
    """An order-finding problem y^r ≡ 1 (mod n) with its register layout.

    Qubits are laid out as register 1 (``q_bits`` exponent qubits), register 2
    (L result qubits) and L + 2 work qubits, where L is the bit length of ``n``.
    The first L + 1 work qubits form the Fourier-space accumulator, the last one
    is the comparison flag.

    Example:
        inst = FactoringInstance()          # n=15, y=7, q=256
        inst.n_qubits                       # 18
        inst.order                          # 4
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(default=15, ge=3)
    y: int = Field(default=7, ge=2)
    q_bits: int = Field(default=8, ge=1)

    @model_validator(mode="after")
    def _check_instance(self) -> FactoringInstance:
        if self.y >= self.n:
            raise ValueError(f"base y={self.y} must be smaller than n={self.n}")
        if math.gcd(self.y, self.n) != 1:
            raise ValueError(f"base y={self.y} shares a factor with n={self.n}")
        q = 1 << self.q_bits
        if not self.n**2 <= q < 2 * self.n**2:
            raise ValueError(f"q=2^{self.q_bits}={q} must satisfy n² ≤ q < 2n² for n={self.n}")
        return self

    @property
    def q(self) -> int:
        return 1 << self.q_bits

    @property
    def width(self) -> int:
        """Bit length L of n."""
        return self.n.bit_length()

    @property
    def n_work(self) -> int:
        return self.width + 2

    @property
    def n_qubits(self) -> int:
        return self.q_bits + self.width + self.n_work

    @property
    def register1(self) -> tuple[int, ...]:
        return tuple(range(self.q_bits))

    @property
    def register2(self) -> tuple[int, ...]:
        start = self.q_bits
        return tuple(range(start, start + self.width))

    @property
    def work(self) -> tuple[int, ...]:
        start = self.q_bits + self.width
        return tuple(range(start, start + self.n_work))

    @property
    def accumulator(self) -> tuple[int, ...]:
        """Work qubits holding the L + 1 bit Fourier-space sum, least significant first."""
        return self.work[: self.width + 1]

    @property
    def flag(self) -> int:
        return self.work[-1]

    @computed_field  # type: ignore[prop-decorator]
    @cached_property
    def order(self) -> int:
        """Multiplicative order of y modulo n, by brute force."""
        value, r = self.y % self.n, 1
        while value != 1:
            value = (value * self.y) % self.n
            r += 1
        return r

    def multiplier(self, k: int) -> int:
        """Constant y^(2^k) mod n applied by the k-th controlled multiplier."""
        return pow(self.y, 1 << k, self.n)

    def modexp(self, j: int) -> int:
        return pow(self.y, j, self.n)


class MeasurementRecord(BaseModel):
    """A measured (or exactly read out) value c of register 1."""

    model_config = ConfigDict(frozen=True)

    c: int = Field(ge=0)
    probability: float = Field(ge=0.0, le=1.0 + 1e-9)
    q: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_range(self) -> MeasurementRecord:
        if self.c >= self.q:
            raise ValueError(f"c={self.c} outside [0, {self.q})")
        return self
