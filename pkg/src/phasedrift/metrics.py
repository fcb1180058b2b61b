"""Fidelity and linear-entropy measures over noise ensembles, with closed-form estimates.

The estimates treat ``l`` qubits as independent, each hit by n_t/l
erroneous pulses, and the CM mode separately with n_cm sideband pulses.
Raw pulse counts overstate the damage: a phase error on a pulse acting on a
basis state does nothing, and a sideband pulse only touches the populated
part of its subspace. :func:`error_exposure` replaces the counts with the
exact first-order sensitivity of the compiled program.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from phasedrift import statevec
from phasedrift.exceptions import DimensionMismatchError, UsageError
from phasedrift.models.metrics import EnsembleResult, ErrorExposure
from phasedrift.models.pulse import Pulse, PulseKind, PulseSequence
from phasedrift.pulse import apply_pulse
from phasedrift.statevec import QuantumState, overlap

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


def _check_counts(n_t: float, n_cm: float, l: int, sigma: float) -> None:  # noqa: E741
    if n_t < 0 or n_cm < 0 or sigma < 0:
        raise UsageError(
            "estimate arguments must be non-negative",
            context={"n_t": n_t, "n_cm": n_cm, "sigma": sigma},
        )
    if l < 1:
        raise UsageError("l must be at least 1", context={"l": l})


def fidelity(actual: QuantumState, ideal: QuantumState) -> float:
    """F = |⟨actual|ideal⟩|², clipped to [0, 1].

    Raises:
        DimensionMismatchError: If the states differ in size.
    """
    value = abs(overlap(actual, ideal)) ** 2
    return min(1.0, max(0.0, value))


def mean_fidelity_estimate(n_t: float, n_cm: float, l: int, sigma: float) -> float:  # noqa: E741
    """Independent-qubit estimate of the ensemble mean fidelity.

    Evaluates [½(1 + e^{−2·n_t·σ²/l})]^l · ½(1 + e^{−2·σ²·n_cm}).

    Args:
        n_t: Erroneous pulses (or their exposure) shared among the ``l`` qubits.
        n_cm: Sideband pulses (or their exposure) seen by the CM mode.
        l: Number of independent qubits.
        sigma: Dispersion of the angle and phase errors in radians.

    Returns:
        The estimate, in [(½)^{l+1}, 1].

    Raises:
        UsageError: On negative arguments or ``l < 1``.
    """
    _check_counts(n_t, n_cm, l, sigma)
    s2 = sigma * sigma
    qubit = 0.5 * (1.0 + math.exp(-2.0 * n_t * s2 / l))
    cm = 0.5 * (1.0 + math.exp(-2.0 * s2 * n_cm))
    return qubit**l * cm


def mean_fidelity_systematic_estimate(
    n_t: float,
    n_cm: float,
    l: int,  # noqa: E741
    eps_bar: float,
    sigma: float,
) -> float:
    """Independent-qubit estimate with a systematic shift ε̄.

    Each exponential gains a factor cos(2ε̄n/l), with n = n_t for the qubits
    and cos(2ε̄·n_cm) for the CM. The estimate ignores the cancellation of
    shifts inside CNOTs whose control is in |g⟩, so it undershoots simulated
    fidelities.

    Args:
        n_t: Qubit pulse count.
        n_cm: CM pulse count.
        l: Number of independent qubits.
        eps_bar: Mean error ε̄ in radians.
        sigma: Dispersion in radians.

    Returns:
        The estimate. Equals :func:`mean_fidelity_estimate` at ε̄ = 0.
    """
    _check_counts(n_t, n_cm, l, sigma)
    s2 = sigma * sigma
    qubit = 0.5 * (1.0 + math.cos(2.0 * eps_bar * n_t / l) * math.exp(-2.0 * n_t * s2 / l))
    cm = 0.5 * (1.0 + math.cos(2.0 * eps_bar * n_cm) * math.exp(-2.0 * s2 * n_cm))
    return qubit**l * cm


def linear_entropy_estimate(n_t: float, n_cm: float, l: int, sigma: float) -> float:  # noqa: E741
    """S_lin = l + 1 − log₂[(1 + e^{−4·n_t·σ²/l})^l · (1 + e^{−4·n_cm·σ²})].

    Args:
        n_t: Qubit pulse count or exposure.
        n_cm: CM pulse count or exposure.
        l: Number of independent qubits.
        sigma: Dispersion in radians.

    Returns:
        The entropy in bits, clipped to [0, l + 1].
    """
    _check_counts(n_t, n_cm, l, sigma)
    s2 = sigma * sigma
    log_sum = l * math.log2(1.0 + math.exp(-4.0 * n_t * s2 / l)) + math.log2(
        1.0 + math.exp(-4.0 * n_cm * s2)
    )
    return min(float(l + 1), max(0.0, l + 1 - log_sum))


def finite_ensemble_entropy(s_lin: float, runs: int) -> float:
    """Expected linear entropy of an M-run mixture drawn from an ensemble with entropy ``s_lin``.

    Each run overlaps itself fully, so the expected purity is
    1/M + (1 − 1/M)·2^{−s_lin}.
    """
    if runs < 1:
        raise UsageError("runs must be at least 1", context={"runs": runs})
    purity = 1.0 / runs + (1.0 - 1.0 / runs) * 2.0 ** (-s_lin)
    return -math.log2(purity)


def pulse_sensitivity(state: QuantumState, pulse: Pulse) -> tuple[float, float]:
    """Variances of the angle and phase error generators of ``pulse``.

    A θ error acts as e^{−iδ(cos φ X + sin φ Y)} after the pulse, a φ error
    as e^{−iηH} with H = sin θ (sin θ Z − cos θ Y'), Y' the generator at
    phase φ − π/2. Both act on the pair the pulse couples.

    Args:
        state: Noiseless state right after ``pulse``.
        pulse: A resonant or sideband pulse.

    Returns:
        ``(var_theta, var_phi)``. Independent N(0, σ²) errors on this pulse
        alone cost σ²·(var_theta + var_phi) of fidelity to lowest order.

    Raises:
        UsageError: For an auxiliary pulse.
    """
    if pulse.theta is None or pulse.phi is None:
        raise UsageError("auxiliary pulses carry no error", context={"kind": pulse.kind.value})
    a, b = statevec.coupled_pair(state, pulse.ion, sideband=pulse.kind is PulseKind.SIDEBAND)
    upper = float(np.vdot(a, a).real)
    lower = float(np.vdot(b, b).real)
    weight = upper + lower
    cross = complex(np.vdot(a, b)) * cmath.exp(-1j * pulse.phi)
    s = math.sin(pulse.theta)
    c = math.cos(pulse.theta)
    var_theta = weight - (2.0 * cross.real) ** 2
    mean_phi = s * (s * (upper - lower) + 2.0 * c * cross.imag)
    var_phi = s * s * weight - mean_phi**2
    return max(0.0, var_theta), max(0.0, var_phi)


def error_exposure(
    program: PulseSequence,
    n_qubits: int,
    initial: QuantumState | None = None,
) -> ErrorExposure:
    """Sum the pulse sensitivities along the noiseless trajectory of ``program``.

    Args:
        program: Compiled pulse program.
        n_qubits: Register size the program runs on.
        initial: Starting state; all-|g⟩ with the CM in |0⟩ when omitted.
            It is copied, not modified.

    Returns:
        The exposure, split into resonant and sideband pulses. Feed
        ``exposure.n_t`` and ``exposure.n_cm`` to the estimates.
    """
    state = QuantumState.zero(n_qubits) if initial is None else initial.copy()
    resonant: list[float] = []
    sideband: list[float] = []
    for pulse in program:
        apply_pulse(state, pulse)
        if pulse.kind.auxiliary or not pulse.erroneous:
            continue
        var_theta, var_phi = pulse_sensitivity(state, pulse)
        target = sideband if pulse.kind is PulseKind.SIDEBAND else resonant
        target.append(var_theta + var_phi)
    exposure = ErrorExposure(
        resonant=math.fsum(resonant),
        sideband=math.fsum(sideband),
        n_resonant=len(resonant),
        n_sideband=len(sideband),
    )
    logger.debug(
        "Exposure of %d erroneous pulses: resonant %.1f, sideband %.1f",
        len(resonant) + len(sideband),
        exposure.resonant,
        exposure.sideband,
    )
    return exposure


def overlap_matrix(states: Sequence[QuantumState]) -> FloatArray:
    """|⟨ψ_i|ψ_j⟩| for every ordered pair, via one Gram product.

    Args:
        states: At least two states of equal dimension.

    Returns:
        An M×M symmetric matrix with unit diagonal and entries in [0, 1].

    Raises:
        UsageError: If fewer than two states are given.
        DimensionMismatchError: If the states differ in size.
    """
    if len(states) < 2:
        raise UsageError("need at least two states", context={"count": len(states)})
    dim = states[0].dimension
    for state in states[1:]:
        if state.dimension != dim:
            raise DimensionMismatchError(dim, state.dimension)
    stacked = np.stack([s.amplitudes for s in states])
    gram = stacked.conj() @ stacked.T
    magnitudes = np.minimum(np.abs(gram), 1.0)
    np.fill_diagonal(magnitudes, 1.0)
    return np.asarray(magnitudes, dtype=np.float64)


def purity_from_overlaps(matrix: FloatArray) -> float:
    """Tr ρ² = Σ_ij |⟨ψ_i|ψ_j⟩|² / M² of the equal-weight mixture."""
    m = matrix.shape[0]
    return float(np.sum(matrix**2) / (m * m))


def linear_entropy_mc(states: Sequence[QuantumState]) -> float:
    """−log₂ Tr ρ_av² of the equal-weight mixture of ``states``, without forming ρ_av.

    With M runs the purity is at least 1/M, so the result is capped at log₂ M.
    """
    purity = purity_from_overlaps(overlap_matrix(states))
    return max(0.0, -math.log2(min(purity, 1.0)))


def summarize_ensemble(
    fidelities: Sequence[float],
    sigma: float,
    mean_eps: float,
    n_t: float,
    n_cm: float,
    l: int = 18,  # noqa: E741
    states: Sequence[QuantumState] | None = None,
) -> EnsembleResult:
    """Bundle per-run fidelities into an :class:`EnsembleResult`.

    Args:
        fidelities: One fidelity per run, in run order.
        sigma: Dispersion of the ensemble.
        mean_eps: Systematic shift of the ensemble.
        n_t: Qubit count or exposure for the estimates.
        n_cm: CM count or exposure for the estimates.
        l: Independent-qubit count.
        states: Final states; when two or more are given their pair
            overlaps are kept for the linear entropy.

    Returns:
        The frozen result record.
    """
    pair_overlaps = None
    if states is not None and len(states) >= 2:
        matrix = overlap_matrix(states)
        pair_overlaps = tuple(tuple(float(v) for v in row) for row in matrix)
    return EnsembleResult(
        sigma=sigma,
        mean_eps=mean_eps,
        fidelities=tuple(float(f) for f in fidelities),
        pair_overlaps=pair_overlaps,
        n_t=n_t,
        n_cm=n_cm,
        l=l,
    )


def peak_weight(distribution: FloatArray, peaks: Sequence[int]) -> float:
    """Total probability on the ``peaks`` bins."""
    return float(np.sum(distribution[list(peaks)]))


def peak_contrast(distribution: FloatArray, peaks: Sequence[int]) -> float:
    """Mean probability on the peak bins relative to the uniform value 1/q.

    Equals q/r for the ideal distribution and 1 for a flat one.
    """
    if not peaks:
        raise UsageError("peak list must not be empty")
    q = distribution.shape[0]
    return peak_weight(distribution, peaks) / len(peaks) * q


def total_variation_from_uniform(distribution: FloatArray) -> float:
    """½·Σ|p − 1/q|; 0 for a flat distribution."""
    q = distribution.shape[0]
    return float(0.5 * np.sum(np.abs(distribution - 1.0 / q)))
