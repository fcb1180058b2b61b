"""Order-finding circuits for Shor factoring, analytic oracles, and classical post-processing.

The modular exponentiation uses Fourier-space constant adders inside a
Beauregard-style modular adder. With L = bit length of n, the work register
holds an (L+1)-qubit accumulator and one comparison flag, so L + 2 work
qubits suffice and every multiplier leaves them in |0⟩.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from phasedrift.circuit import CircuitBuilder, inverse_gates
from phasedrift.exceptions import (
    ConstructionError,
    InconclusiveMeasurementError,
    RetryWithNewBaseError,
    UsageError,
)
from phasedrift.models.circuit import Circuit, Gate
from phasedrift.models.shor import FactoringInstance, MeasurementRecord, Stage
from phasedrift.statevec import QuantumState

logger = logging.getLogger(__name__)

MAX_WORK_QUBITS = 6

# Register-1 preparation: R(π/4, π/2)|g⟩ = (|g⟩ + |e⟩)/√2 exactly.
PREP_THETA = math.pi / 4
PREP_PHI = math.pi / 2

FloatArray = npt.NDArray[np.float64]


# --- Fourier transforms -----------------------------------------------------


def qft_gates(qubits: Sequence[int], swaps: bool = True) -> list[Gate]:
    """QFT on ``qubits`` (least significant first), |b⟩ → Σ_k e^{2πi·bk/2^n}|k⟩/√2^n.

    Without ``swaps`` the output is left bit-reversed: qubit t carries the
    phase 2π·b/2^(t+1).
    """
    n = len(qubits)
    builder = CircuitBuilder(max(qubits) + 1)
    for t in range(n - 1, -1, -1):
        builder.h(qubits[t])
        for m in range(t - 1, -1, -1):
            builder.cphase(qubits[m], qubits[t], math.pi / (1 << (t - m)))
    if swaps:
        for i in range(n // 2):
            builder.swap(qubits[i], qubits[n - 1 - i])
    return list(builder.gates)


def build_qft_circuit(bits: int) -> Circuit:
    """Coherent QFT on a standalone register of ``bits`` qubits."""
    if bits < 1:
        raise UsageError("QFT needs at least one qubit", context={"bits": bits})
    qubits = tuple(range(bits))
    builder = CircuitBuilder(bits, registers={"register1": qubits})
    builder.extend(qft_gates(qubits))
    return builder.build()


def register_qft_circuit(inst: FactoringInstance) -> Circuit:
    """QFT on register 1 of the full factoring layout."""
    builder = CircuitBuilder(inst.n_qubits, registers=_registers(inst))
    builder.extend(qft_gates(inst.register1))
    return builder.build()


# --- modular arithmetic -----------------------------------------------------


class _ModularArithmetic:
    """Emits controlled modular multipliers for one instance into a builder."""

    def __init__(self, inst: FactoringInstance, builder: CircuitBuilder) -> None:
        self.inst = inst
        self.builder = builder
        self.acc = inst.accumulator
        self.flag = inst.flag
        self.modulus = 1 << len(self.acc)

    def _angles(self, constant: int) -> list[tuple[int, float]]:
        """(qubit, angle) pairs adding ``constant`` in Fourier space; zero angles dropped."""
        n_acc = len(self.acc)
        angles = []
        for t, qubit in enumerate(self.acc):
            numerator = (constant << (n_acc - 1 - t)) % self.modulus
            if numerator == 0:
                continue
            if numerator > self.modulus // 2:
                numerator -= self.modulus
            angles.append((qubit, 2 * math.pi * numerator / self.modulus))
        return angles

    def _add(self, b: CircuitBuilder, constant: int, sign: int = 1) -> None:
        for qubit, angle in self._angles(constant):
            b.phase(qubit, sign * angle)

    def _controlled_add(self, b: CircuitBuilder, control: int, constant: int, sign: int = 1) -> None:
        for qubit, angle in self._angles(constant):
            b.cphase(control, qubit, sign * angle)

    def _doubly_controlled_add(
        self,
        b: CircuitBuilder,
        c1: int,
        c2: int,
        constant: int,
        sign: int = 1,
    ) -> None:
        # phase θ·c1·c2 = θ/2·c2 − θ/2·(c1 ⊕ c2) + θ/2·c1
        angles = [(qubit, sign * angle / 2) for qubit, angle in self._angles(constant)]
        if not angles:
            return
        for qubit, half in angles:
            b.cphase(c2, qubit, half)
        b.cnot(c1, c2)
        for qubit, half in angles:
            b.cphase(c2, qubit, -half)
        b.cnot(c1, c2)
        for qubit, half in angles:
            b.cphase(c1, qubit, half)

    def _qft(self, b: CircuitBuilder) -> None:
        b.extend(qft_gates(self.acc, swaps=False))

    def _iqft(self, b: CircuitBuilder) -> None:
        b.extend_inverse(qft_gates(self.acc, swaps=False))

    def modular_adder(self, c1: int, c2: int, constant: int) -> list[Gate]:
        """Doubly controlled acc ← acc + constant mod n, acc in Fourier space.

        Requires acc < n on entry; the flag returns to |0⟩.
        """
        n = self.inst.n
        msb = self.acc[-1]
        b = CircuitBuilder(self.inst.n_qubits)
        self._doubly_controlled_add(b, c1, c2, constant)
        self._add(b, n, sign=-1)
        self._iqft(b)
        b.cnot(msb, self.flag)
        self._qft(b)
        self._controlled_add(b, self.flag, n)
        self._doubly_controlled_add(b, c1, c2, constant, sign=-1)
        self._iqft(b)
        b.x(msb).cnot(msb, self.flag).x(msb)
        self._qft(b)
        self._doubly_controlled_add(b, c1, c2, constant)
        return list(b.gates)

    def multiply_accumulate(self, control: int, constant: int) -> list[list[Gate]]:
        """Controlled acc ← acc + constant·x mod n, as [QFT, adders..., IQFT] segments."""
        n = self.inst.n
        qft = CircuitBuilder(self.inst.n_qubits)
        self._qft(qft)
        segments = [list(qft.gates)]
        for i, x_bit in enumerate(self.inst.register2):
            segments.append(self.modular_adder(control, x_bit, (constant << i) % n))
        iqft = CircuitBuilder(self.inst.n_qubits)
        self._iqft(iqft)
        segments.append(list(iqft.gates))
        return segments

    def _emit_segments(self, segments: Sequence[list[Gate]], inverse: bool) -> None:
        ordered = list(reversed(segments)) if inverse else list(segments)
        last = len(ordered) - 1
        for position, segment in enumerate(ordered):
            if inverse:
                self.builder.extend_inverse(segment)
            else:
                self.builder.extend(segment)
            if 0 < position < last and segment:
                self.builder.mark_checkpoint((self.flag,), label="modular-adder")

    def controlled_multiplier(self, control: int, constant: int, label: str) -> None:
        """x ← constant·x mod n when ``control`` is set; work qubits end in |0⟩."""
        n = self.inst.n
        inverse = pow(constant, -1, n)
        self._emit_segments(self.multiply_accumulate(control, constant), inverse=False)
        for x_bit, acc_bit in zip(self.inst.register2, self.acc, strict=False):
            self.builder.cnot(acc_bit, x_bit)
            self.builder.toffoli(control, x_bit, acc_bit)
            self.builder.cnot(acc_bit, x_bit)
        self._emit_segments(self.multiply_accumulate(control, inverse), inverse=True)
        self.builder.mark_checkpoint(self.inst.work, include_cm=True, label=label)


def _registers(inst: FactoringInstance) -> dict[str, tuple[int, ...]]:
    return {"register1": inst.register1, "register2": inst.register2, "work": inst.work}


def _resolve_multipliers(inst: FactoringInstance, n_multipliers: int | None) -> int:
    k = inst.q_bits if n_multipliers is None else n_multipliers
    if not 1 <= k <= inst.q_bits:
        raise UsageError(
            "number of multipliers out of range",
            context={"n_multipliers": k, "max": inst.q_bits},
        )
    return k


def build_modexp_circuit(
    inst: FactoringInstance,
    n_multipliers: int | None = None,
    optimized: bool = False,
) -> Circuit:
    """Prepare |Ψ₀⟩ and apply the controlled multipliers by y^(2^k) mod n.

    Args:
        inst: The factoring instance and its qubit layout.
        n_multipliers: Keep only the first multipliers; all ``q_bits`` when None.
        optimized: Skip multipliers whose constant is 1. They are emitted by
            default so pulse totals reflect a generic circuit.

    Returns:
        The gate-level circuit. Multiplier boundaries carry checkpoint marks
        for the work register.

    Raises:
        ConstructionError: The layout needs more work qubits than available.
        UsageError: ``n_multipliers`` outside [1, q_bits].
    """
    if inst.n_work > MAX_WORK_QUBITS:
        raise ConstructionError(
            "modular multiplier needs more work qubits than the simulator holds",
            context={"needed": inst.n_work, "limit": MAX_WORK_QUBITS, "n": inst.n},
        )
    k_max = _resolve_multipliers(inst, n_multipliers)
    builder = CircuitBuilder(inst.n_qubits, registers=_registers(inst))
    for qubit in inst.register1:
        builder.rotation(qubit, PREP_THETA, PREP_PHI)
    builder.x(inst.register2[0])
    arithmetic = _ModularArithmetic(inst, builder)
    for k in range(k_max):
        constant = inst.multiplier(k)
        if optimized and constant == 1:
            logger.debug("Skipping identity multiplier %d", k)
            continue
        arithmetic.controlled_multiplier(inst.register1[k], constant, label=f"multiplier-{k}")
    circuit = builder.build()
    logger.info(
        "Built modular exponentiation for n=%d y=%d: %d multipliers, %d gates",
        inst.n,
        inst.y,
        k_max,
        len(circuit),
    )
    return circuit


def build_factoring_circuit(
    inst: FactoringInstance,
    n_multipliers: int | None = None,
    optimized: bool = False,
) -> Circuit:
    """Modular exponentiation followed by the coherent QFT on register 1."""
    return build_modexp_circuit(inst, n_multipliers, optimized).then(register_qft_circuit(inst))


# --- analytic oracles -------------------------------------------------------


def _exponent_values(inst: FactoringInstance, n_multipliers: int | None) -> npt.NDArray[np.int64]:
    k = _resolve_multipliers(inst, n_multipliers)
    j = np.arange(inst.q, dtype=np.int64)
    effective = j & ((1 << k) - 1)
    return np.array([inst.modexp(int(e)) for e in effective], dtype=np.int64)


def _joint_amplitudes(
    inst: FactoringInstance,
    stage: Stage,
    n_multipliers: int | None,
) -> npt.NDArray[np.complex128]:
    """Amplitudes indexed [x, j] over register 2 value x and register 1 value j."""
    values = _exponent_values(inst, n_multipliers)
    joint = np.zeros((1 << inst.width, inst.q), dtype=np.complex128)
    joint[values, np.arange(inst.q)] = 1.0 / math.sqrt(inst.q)
    if stage is Stage.POST_FT:
        joint = np.fft.ifft(joint, axis=1) * math.sqrt(inst.q)
    return joint


def ideal_state(
    inst: FactoringInstance,
    stage: Stage,
    n_multipliers: int | None = None,
) -> QuantumState:
    """Closed-form Σ_j |j⟩|y^j mod n⟩/√q (pre-FT) or its register-1 DFT (post-FT).

    Args:
        inst: The factoring instance.
        stage: Before or after the Fourier transform.
        n_multipliers: Match a truncated circuit: only the low exponent bits
            enter y^j.

    Returns:
        A normalized state with the work qubits and the CM in |0⟩.
    """
    joint = _joint_amplitudes(inst, stage, n_multipliers)
    amplitudes = np.zeros(1 << (inst.n_qubits + 1), dtype=np.complex128)
    x_values, j_values = np.nonzero(np.abs(joint) > 0)
    qubit_bits = j_values | (x_values << inst.q_bits)
    amplitudes[qubit_bits << 1] = joint[x_values, j_values]
    return QuantumState(inst.n_qubits, amplitudes)


def analytic_pc(inst: FactoringInstance, n_multipliers: int | None = None) -> FloatArray:
    """P(c) of measuring c in register 1 after the QFT.

    Returns:
        An array of length q summing to 1; for n=15, y=7, q=256 it has four
        equal peaks at multiples of 64.
    """
    joint = _joint_amplitudes(inst, Stage.POST_FT, n_multipliers)
    return np.asarray(np.sum(np.abs(joint) ** 2, axis=0), dtype=np.float64)


def analytic_joint(inst: FactoringInstance, n_multipliers: int | None = None) -> FloatArray:
    """Pre-FT joint probabilities indexed [j, x]."""
    joint = _joint_amplitudes(inst, Stage.PRE_FT, n_multipliers)
    return np.asarray(np.abs(joint.T) ** 2, dtype=np.float64)


# --- classical post-processing ----------------------------------------------


def find_peaks(distribution: FloatArray, threshold: float | None = None) -> list[int]:
    """Values whose probability exceeds ``threshold``.

    Args:
        distribution: Probabilities over register-1 values.
        threshold: Absolute cutoff; half the maximum when None.

    Returns:
        The qualifying values c in increasing order.
    """
    cutoff = 0.5 * float(np.max(distribution)) if threshold is None else threshold
    return [int(c) for c in np.flatnonzero(distribution > cutoff)]


def sample_measurements(
    distribution: FloatArray,
    shots: int,
    rng: np.random.Generator,
) -> list[MeasurementRecord]:
    """Simulated readouts of register 1 as observed frequencies.

    Args:
        distribution: P(c); clipped at 0 and renormalized before sampling.
        shots: Number of readouts, at least 1.
        rng: Source of the multinomial draw.

    Returns:
        One record per observed value, with its relative frequency.

    Raises:
        UsageError: If ``shots < 1``.
    """
    if shots < 1:
        raise UsageError("shots must be positive", context={"shots": shots})
    probs = np.clip(distribution, 0.0, None)
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    q = len(distribution)
    return [
        MeasurementRecord(c=int(c), probability=int(counts[c]) / shots, q=q)
        for c in np.flatnonzero(counts)
    ]


def order_candidates(c: int, q: int, max_denominator: int) -> list[int]:
    """Denominators of the continued-fraction convergents of c/q below ``max_denominator``."""
    denominators: list[int] = []
    remainder = Fraction(c, q)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while True:
        a = math.floor(remainder)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        if k >= max_denominator:
            break
        if k > 1 and k not in denominators:
            denominators.append(k)
        frac = remainder - a
        if frac == 0:
            break
        remainder = 1 / frac
    return denominators


def extract_order(peaks: Sequence[int], inst: FactoringInstance) -> int:
    """Order r from peak positions c ≈ m·q/r, verified by y^r ≡ 1 (mod n).

    Raises:
        InconclusiveMeasurementError: No candidate passes verification.
    """
    distinct = sorted(set(peaks))
    if any(not 0 <= c < inst.q for c in distinct):
        raise UsageError("peak outside [0, q)", context={"peaks": distinct, "q": inst.q})
    nonzero = [c for c in distinct if c]
    if not nonzero:
        raise InconclusiveMeasurementError("c = 0 carries no order information", peaks=distinct)

    candidates: list[int] = []
    spacing = 0
    for c in distinct:
        spacing = math.gcd(spacing, c)
    if len(distinct) >= 2 and inst.q % spacing == 0:
        candidates.append(inst.q // spacing)
    denominators: list[int] = []
    for c in nonzero:
        denominators.extend(order_candidates(c, inst.q, inst.n))
    candidates.extend(denominators)
    if denominators:
        candidates.append(math.lcm(*denominators))

    verified = sorted({r for r in candidates if r > 0 and pow(inst.y, r, inst.n) == 1})
    if not verified:
        logger.warning("Order extraction inconclusive for peaks %s", distinct)
        raise InconclusiveMeasurementError(peaks=distinct)
    return verified[0]


def factors_from_order(inst: FactoringInstance, r: int) -> tuple[int, int]:
    """(gcd(y^(r/2) − 1, n), gcd(y^(r/2) + 1, n)).

    Raises:
        RetryWithNewBaseError: r is odd, y^(r/2) ≡ −1 (mod n), or a gcd is trivial.
    """
    if r < 1 or r % 2:
        raise RetryWithNewBaseError("order is odd", y=inst.y, r=r)
    half = pow(inst.y, r // 2, inst.n)
    if half == inst.n - 1:
        raise RetryWithNewBaseError("y^(r/2) ≡ −1 (mod n)", y=inst.y, r=r)
    p = math.gcd(half - 1, inst.n)
    q = math.gcd(half + 1, inst.n)
    if p in (1, inst.n) or q in (1, inst.n):
        raise RetryWithNewBaseError("order gives only trivial factors", y=inst.y, r=r)
    return p, q
