"""Experiment runner: noise ensembles, σ sweeps, watchdog study, and their CSV artifacts.

Runs are independent and seeded from ``(master_seed, run_index)``. With
``jobs > 1`` they are spread over a process pool and collected in run order,
so every artifact is identical for any ``jobs``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict

from phasedrift import metrics, shor
from phasedrift.circuit import compile_circuit, dump_lines, pulse_counts
from phasedrift.exceptions import (
    InconclusiveMeasurementError,
    InvariantViolationError,
    RetryWithNewBaseError,
)
from phasedrift.models.circuit import Circuit
from phasedrift.models.config import CircuitMode, ExperimentConfig
from phasedrift.models.metrics import EnsembleResult, ErrorExposure
from phasedrift.models.noise import NoiseModel
from phasedrift.models.pulse import PulseCounts, PulseSequence
from phasedrift.models.shor import FactoringInstance, Stage
from phasedrift.models.watchdog import WatchdogMode, WatchdogOutcome, WatchdogSchedule
from phasedrift.noise import derive_run_rng
from phasedrift.pulse import execute
from phasedrift.statevec import QuantumState, register_distribution
from phasedrift.utils.artifacts import ArtifactWriter
from phasedrift.watchdog import (
    AnalyticOracle,
    NoiselessTrajectory,
    independent_qubit_watchdog_estimate,
    run_with_full_projection,
    run_with_watchdog,
    schedule_from_circuit,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
FactoringRow = tuple[float, int, int, int | None, int | None, int | None]

FIG2_HEADER = (
    "sigma",
    "mean_eps",
    "runs",
    "mean_fidelity",
    "fidelity_std",
    "eq2_estimate",
    "slin_mc",
    "eq3_estimate",
    "n_t",
    "n_cm",
    "l",
    "systematic_estimate",
    "n_erroneous",
    "n_sideband",
)
WATCHDOG_REPORT_HEADER = ("run", "checkpoint", "probability", "cumulative")
WATCHDOG_SUMMARY_HEADER = (
    "sigma",
    "mean_eps",
    "mode",
    "mean_fidelity",
    "std",
    "mean_survival",
    "survival_std",
    "independent_estimate",
)
WATCHDOG_OVERLAP_HEADER = ("sigma", "mean_eps", "mode", "mean_overlap", "std")
FLATNESS_HEADER = ("sigma", "peak_contrast", "tv_from_uniform", "peak_weight")
COUNTS_HEADER = ("n_resonant", "n_sideband", "n_aux", "n_erroneous", "n_total", "erroneous_fraction")
OPERATIONS_HEADER = (
    "multipliers",
    "sigma",
    "mean_eps",
    "runs",
    "n_erroneous",
    "n_t",
    "n_cm",
    "mean_fidelity",
    "fidelity_std",
    "estimate",
    "relative_spread",
)
SAMPLES_HEADER = ("c", "frequency")
FACTORING_HEADER = ("sigma", "shots", "peaks", "order", "p", "q")

NOISELESS_FIDELITY_TOL = 1e-8
NOISELESS_SURVIVAL_TOL = 1e-10
DISTRIBUTION_SUM_TOL = 1e-6
SAMPLING_STREAM = 1


class CompiledFactoring(BaseModel):
    """Circuits and pulse programs of one configured factoring run."""

    model_config = ConfigDict(frozen=True)

    instance: FactoringInstance
    n_multipliers: int
    modexp: Circuit
    qft: Circuit
    modexp_program: PulseSequence
    qft_program: PulseSequence

    @property
    def modexp_counts(self) -> PulseCounts:
        return pulse_counts(self.modexp_program)

    @property
    def counts(self) -> PulseCounts:
        return self.modexp_counts + pulse_counts(self.qft_program)


@lru_cache(maxsize=8)
def _compiled(n: int, y: int, q_bits: int, mode: str) -> CompiledFactoring:
    config = ExperimentConfig(n=n, y=y, q_bits=q_bits, circuit=mode)
    inst = config.instance()
    k = config.circuit.n_multipliers(inst)
    modexp = shor.build_modexp_circuit(inst, k, optimized=config.circuit.optimized)
    qft = shor.register_qft_circuit(inst)
    return CompiledFactoring(
        instance=inst,
        n_multipliers=k,
        modexp=modexp,
        qft=qft,
        modexp_program=compile_circuit(modexp),
        qft_program=compile_circuit(qft),
    )


def compiled_for(config: ExperimentConfig) -> CompiledFactoring:
    """Per-process cached build of the configured circuit."""
    return _compiled(config.n, config.y, config.q_bits, str(config.circuit))


@lru_cache(maxsize=8)
def _exposure(n: int, y: int, q_bits: int, mode: str) -> ErrorExposure:
    compiled = _compiled(n, y, q_bits, mode)
    return metrics.error_exposure(compiled.modexp_program, compiled.instance.n_qubits)


def exposure_for(config: ExperimentConfig) -> ErrorExposure:
    """Per-process cached error exposure of the configured modular exponentiation."""
    return _exposure(config.n, config.y, config.q_bits, str(config.circuit))


@lru_cache(maxsize=4)
def _ideal(n: int, y: int, q_bits: int, k: int, stage: Stage) -> QuantumState:
    return shor.ideal_state(FactoringInstance(n=n, y=y, q_bits=q_bits), stage, k)


def ideal_for(config: ExperimentConfig, stage: Stage = Stage.PRE_FT) -> QuantumState:
    compiled = compiled_for(config)
    return _ideal(config.n, config.y, config.q_bits, compiled.n_multipliers, stage)


# --- per-run workers (module level so process pools can pickle them) ---------


def simulate_run(
    config: ExperimentConfig,
    sigma: float,
    run_index: int,
    through_qft: bool = False,
) -> tuple[QuantumState, QuantumState | None]:
    """Noisy pre-FT state of one run and, if requested, the post-FT state from the same stream."""
    compiled = compiled_for(config)
    rng = derive_run_rng(config.noise_model(sigma), run_index)
    state = QuantumState.zero(compiled.instance.n_qubits)
    execute(state, compiled.modexp_program, rng=rng)
    if not through_qft:
        return state, None
    post = execute(state.copy(), compiled.qft_program, rng=rng)
    return state, post


def _watchdog_schedule(config: ExperimentConfig) -> WatchdogSchedule:
    return schedule_from_circuit(compiled_for(config).modexp)


def supervised_run(
    config: ExperimentConfig,
    sigma: float,
    run_index: int,
    mode: WatchdogMode,
    keep_state: bool = False,
) -> WatchdogOutcome:
    """One modular-exponentiation run under the given watchdog mode."""
    compiled = compiled_for(config)
    noise = config.noise_model(sigma)
    rng = derive_run_rng(noise, run_index)
    terminal = ideal_for(config)
    if mode is WatchdogMode.OFF:
        return run_with_watchdog(
            compiled.modexp, WatchdogSchedule(), noise, rng, AnalyticOracle(terminal), keep_state
        )
    schedule = _watchdog_schedule(config)
    if mode is WatchdogMode.PARTIAL:
        return run_with_watchdog(
            compiled.modexp, schedule, noise, rng, AnalyticOracle(terminal), keep_state
        )
    oracle = NoiselessTrajectory(compiled.instance.n_qubits)
    return run_with_full_projection(compiled.modexp, schedule, noise, rng, oracle, keep_state)


def _run_fidelity(config: ExperimentConfig, sigma: float, run_index: int) -> float:
    state, _ = simulate_run(config, sigma, run_index)
    return metrics.fidelity(state, ideal_for(config))


def _fidelity_task(
    config: ExperimentConfig,
    sigma: float,
    run_index: int,
) -> tuple[float, QuantumState | None]:
    if config.watchdog is WatchdogMode.OFF:
        state, _ = simulate_run(config, sigma, run_index)
        return metrics.fidelity(state, ideal_for(config)), state
    outcome = supervised_run(config, sigma, run_index, config.watchdog, keep_state=True)
    return outcome.watchdog_fidelity, outcome.final_state


def _watchdog_task(
    config: ExperimentConfig,
    sigma: float,
    run_index: int,
) -> tuple[WatchdogOutcome, WatchdogOutcome, WatchdogOutcome]:
    off = supervised_run(config, sigma, run_index, WatchdogMode.OFF)
    partial_ = supervised_run(config, sigma, run_index, WatchdogMode.PARTIAL)
    project = supervised_run(config, sigma, run_index, WatchdogMode.PROJECT)
    return off, partial_, project


def _sigma_label(sigma: float) -> str:
    return format(sigma, "g")


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    if max(values) == min(values):
        return float(values[0]), 0.0
    mean = math.fsum(values) / len(values)
    return mean, math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))


class ExperimentRunner:
    """Runs the experiments of one :class:`ExperimentConfig`.

    Example usage:
        config = ExperimentConfig(sigmas=(0.0, 0.005), runs=20, out_dir=Path("out"))
        with ExperimentRunner(config) as runner:
            print(runner.pulse_counts)
            runner.run_fig2()
    """

    def __init__(self, config: ExperimentConfig) -> None:
        self._config = config
        self._writer = ArtifactWriter(config.out_dir)
        self._results: dict[float, EnsembleResult] = {}

    @property
    def config(self) -> ExperimentConfig:
        return self._config

    @property
    def instance(self) -> FactoringInstance:
        return self.compiled.instance

    @property
    def compiled(self) -> CompiledFactoring:
        return compiled_for(self._config)

    @property
    def circuit(self) -> Circuit:
        """Modular exponentiation followed by the register-1 QFT."""
        return self.compiled.modexp.then(self.compiled.qft)

    @property
    def program(self) -> PulseSequence:
        return self.compiled.modexp_program + self.compiled.qft_program

    @property
    def pulse_counts(self) -> PulseCounts:
        return self.compiled.counts

    @property
    def exposure(self) -> ErrorExposure:
        """Error exposure of the modular exponentiation, the n_t and n_cm of the estimates."""
        return exposure_for(self._config)

    @property
    def writer(self) -> ArtifactWriter:
        return self._writer

    @property
    def results(self) -> dict[float, EnsembleResult]:
        """Ensemble results of the last :meth:`run_fig2`, keyed by σ."""
        return dict(self._results)

    def noise_model(self, sigma: float) -> NoiseModel:
        return self._config.noise_model(sigma)

    def _map_runs(self, task: Callable[[int], T]) -> list[T]:
        indices = range(self._config.runs)
        if self._config.jobs > 1 and self._config.runs > 1:
            with ProcessPoolExecutor(max_workers=self._config.jobs) as pool:
                return list(pool.map(task, indices))
        return [task(i) for i in indices]

    def _dump_program(self) -> list[Path]:
        if not self._config.dump_pulses:
            return []
        return [
            self._writer.write_lines("pulses.txt", self.program.dump_lines()),
            self._writer.write_lines("circuit.txt", dump_lines(self.circuit)),
        ]

    def _check_distribution(self, name: str, distribution: np.ndarray[Any, Any]) -> None:
        total = float(np.sum(distribution))
        if abs(total - 1.0) > DISTRIBUTION_SUM_TOL:
            raise InvariantViolationError(
                "distribution does not sum to 1", context={"file": name, "sum": total}
            )

    def run_fig1(self) -> list[Path]:
        """Joint pre-FT and register-1 post-FT distributions, one representative run per σ."""
        config = self._config
        inst = self.instance
        k = self.compiled.n_multipliers
        files = self._dump_program()
        reference_pc = shor.analytic_pc(inst, k)
        peaks = shor.find_peaks(reference_pc)
        files.append(self._writer.write_joint("fig1a_joint_ideal.csv", shor.analytic_joint(inst, k)))
        files.append(self._writer.write_distribution("fig1b_pc_analytic.csv", reference_pc))
        support = np.zeros((inst.q, 1 << inst.width), dtype=bool)
        support[np.arange(inst.q), [inst.modexp(j & ((1 << k) - 1)) for j in range(inst.q)]] = True

        flatness = []
        factoring: list[FactoringRow] = []
        for index, sigma in enumerate(config.sigmas):
            label = _sigma_label(sigma)
            logger.info("Distribution run at sigma=%s", label)
            pre, post = simulate_run(config, sigma, 0, through_qft=True)
            assert post is not None
            joint = (
                register_distribution(pre, inst.register1 + inst.register2)
                .reshape(1 << inst.width, inst.q)
                .T
            )
            pc = register_distribution(post, inst.register1)
            joint_name = f"fig1a_joint_sigma{label}.csv"
            pc_name = f"fig1b_pc_sigma{label}.csv"
            self._check_distribution(joint_name, joint)
            self._check_distribution(pc_name, pc)
            if self.noise_model(sigma).noiseless:
                leaked = float(np.sum(joint[~support]))
                if leaked > NOISELESS_FIDELITY_TOL:
                    raise InvariantViolationError(
                        "noiseless joint distribution leaves the (j, y^j mod n) support",
                        context={"leaked": leaked},
                    )
            files.append(self._writer.write_joint(joint_name, joint))
            files.append(self._writer.write_distribution(pc_name, pc))
            if config.dump_state:
                files.append(pre.write_dump(self._writer.path(f"state_sigma{label}_run0.txt")))
            flatness.append(
                (
                    sigma,
                    metrics.peak_contrast(pc, peaks),
                    metrics.total_variation_from_uniform(pc),
                    metrics.peak_weight(pc, peaks),
                )
            )
            if config.shots:
                path, row = self._sample_readout(index, pc)
                files.append(path)
                factoring.append(row)
        files.append(self._writer.write_csv("fig1_flatness.csv", FLATNESS_HEADER, flatness))
        if config.shots:
            files.append(self._writer.write_csv("fig1_factoring.csv", FACTORING_HEADER, factoring))
        return files

    def _sample_readout(self, index: int, pc: np.ndarray[Any, Any]) -> tuple[Path, FactoringRow]:
        """Sample register-1 readouts for the ``index``-th σ and push them through order finding."""
        config = self._config
        sigma = config.sigmas[index]
        label = _sigma_label(sigma)
        inst = self.instance
        seed = np.random.SeedSequence(entropy=config.master_seed, spawn_key=(index, SAMPLING_STREAM))
        records = shor.sample_measurements(pc, config.shots, np.random.default_rng(seed))
        frequencies = np.zeros(inst.q)
        for record in records:
            frequencies[record.c] = record.probability
        peaks = shor.find_peaks(frequencies)
        order: int | None = None
        p: int | None = None
        q: int | None = None
        try:
            order = shor.extract_order(peaks, inst)
            p, q = shor.factors_from_order(inst, order)
        except (InconclusiveMeasurementError, RetryWithNewBaseError) as exc:
            logger.info("Sampled readout at sigma=%s did not factor: %s", label, exc)
        path = self._writer.write_csv(
            f"fig1c_samples_sigma{label}.csv",
            SAMPLES_HEADER,
            ((r.c, r.probability) for r in records),
        )
        return path, (sigma, config.shots, len(peaks), order, p, q)

    def run_fig2(self) -> list[Path]:
        """Mean fidelity and linear entropy per σ against the closed-form estimates."""
        config = self._config
        counts = self.compiled.modexp_counts
        exposure = self.exposure
        n_t, n_cm = exposure.n_t, exposure.n_cm
        logger.info(
            "Exposure n_t=%.1f n_cm=%.1f from %d erroneous pulses", n_t, n_cm, counts.n_erroneous
        )
        files = self._dump_program()
        rows = []
        self._results = {}
        for sigma in config.sigmas:
            mean_eps = config.mean_eps_for(sigma)
            logger.info("Sweep ensemble: sigma=%s mean_eps=%s runs=%d", sigma, mean_eps, config.runs)
            outcomes = self._map_runs(partial(_fidelity_task, config, sigma))
            fidelities = [f for f, _ in outcomes]
            states = [s for _, s in outcomes if s is not None]
            if config.dump_state and states:
                files.append(
                    states[0].write_dump(self._writer.path(f"state_sigma{_sigma_label(sigma)}_run0.txt"))
                )
            result = metrics.summarize_ensemble(
                fidelities,
                sigma=sigma,
                mean_eps=mean_eps,
                n_t=n_t,
                n_cm=n_cm,
                l=config.l,
                states=states if len(states) == len(fidelities) else None,
            )
            del states, outcomes
            if self.noise_model(sigma).noiseless:
                worst = min(result.fidelities)
                if worst < 1.0 - NOISELESS_FIDELITY_TOL:
                    raise InvariantViolationError(
                        "noiseless run does not reproduce the ideal state",
                        context={"sigma": sigma, "fidelity": worst},
                    )
            self._results[sigma] = result
            rows.append(
                (
                    sigma,
                    mean_eps,
                    result.runs,
                    result.mean_fidelity,
                    result.fidelity_std,
                    metrics.mean_fidelity_estimate(n_t, n_cm, config.l, sigma),
                    result.slin_mc,
                    metrics.linear_entropy_estimate(n_t, n_cm, config.l, sigma),
                    n_t,
                    n_cm,
                    config.l,
                    metrics.mean_fidelity_systematic_estimate(n_t, n_cm, config.l, mean_eps, sigma),
                    counts.n_erroneous,
                    counts.n_sideband,
                )
            )
            logger.info(
                "sigma=%s: mean fidelity %.6f ± %.6f", sigma, result.mean_fidelity, result.fidelity_std
            )
        files.append(self._writer.write_csv("fig2_sweep.csv", FIG2_HEADER, rows))
        return files

    def run_watchdog_study(self) -> list[Path]:
        """Paired off / partial / full-projection ensembles on matched seeds."""
        config = self._config
        if config.circuit.kind != "truncated":
            logger.warning("Watchdog study on a %s circuit; the study uses a truncated one", config.circuit)
        counts = self.compiled.modexp_counts
        files = self._dump_program()
        summary = []
        overlaps = []
        for sigma in config.sigmas:
            mean_eps = config.mean_eps_for(sigma)
            label = _sigma_label(sigma)
            logger.info("Watchdog study: sigma=%s mean_eps=%s runs=%d", sigma, mean_eps, config.runs)
            paired = self._map_runs(partial(_watchdog_task, config, sigma))
            by_mode = {
                WatchdogMode.OFF: [p[0] for p in paired],
                WatchdogMode.PARTIAL: [p[1] for p in paired],
                WatchdogMode.PROJECT: [p[2] for p in paired],
            }
            estimate = independent_qubit_watchdog_estimate(
                counts.n_erroneous, counts.n_sideband, config.l, mean_eps
            )
            for mode, outcomes in by_mode.items():
                self._check_watchdog(sigma, mode, outcomes)
                fidelity_mean, fidelity_std = _mean_std([o.watchdog_fidelity for o in outcomes])
                survival_mean, survival_std = _mean_std([o.survival for o in outcomes])
                overlap_mean, overlap_std = _mean_std([o.terminal_fidelity for o in outcomes])
                summary.append(
                    (
                        sigma,
                        mean_eps,
                        mode.value,
                        fidelity_mean,
                        fidelity_std,
                        survival_mean,
                        survival_std,
                        estimate,
                    )
                )
                overlaps.append((sigma, mean_eps, mode.value, overlap_mean, overlap_std))
                if mode is not WatchdogMode.OFF:
                    report = (
                        (run, checkpoint, p, c)
                        for run, outcome in enumerate(outcomes)
                        for checkpoint, (p, c) in enumerate(
                            zip(outcome.probabilities, outcome.cumulative, strict=True)
                        )
                    )
                    files.append(
                        self._writer.write_csv(
                            f"watchdog_report_sigma{label}_{mode.value}.csv",
                            WATCHDOG_REPORT_HEADER,
                            report,
                        )
                    )
                logger.info(
                    "sigma=%s %s: mean fidelity %.6f, survival %.6f",
                    label,
                    mode.value,
                    fidelity_mean,
                    survival_mean,
                )
            logger.info("Independent-qubit watchdog estimate at sigma=%s: %.6f", label, estimate)
        files.append(self._writer.write_csv("watchdog_summary.csv", WATCHDOG_SUMMARY_HEADER, summary))
        files.append(self._writer.write_csv("watchdog_overlap.csv", WATCHDOG_OVERLAP_HEADER, overlaps))
        return files

    def _check_watchdog(
        self,
        sigma: float,
        mode: WatchdogMode,
        outcomes: Sequence[WatchdogOutcome],
    ) -> None:
        for run, outcome in enumerate(outcomes):
            if not outcome.monotone:
                raise InvariantViolationError(
                    "survival increased after a checkpoint",
                    context={"sigma": sigma, "mode": mode.value, "run": run},
                )
            if not self.noise_model(sigma).noiseless:
                continue
            if (
                outcome.survival < 1.0 - NOISELESS_SURVIVAL_TOL
                or outcome.terminal_fidelity < 1.0 - NOISELESS_FIDELITY_TOL
            ):
                raise InvariantViolationError(
                    "noiseless supervised run lost fidelity",
                    context={
                        "mode": mode.value,
                        "run": run,
                        "survival": outcome.survival,
                        "fidelity": outcome.terminal_fidelity,
                    },
                )

    def run_operations_sweep(self, multipliers: Sequence[int] | None = None) -> list[Path]:
        """Fidelity against circuit length: truncated circuits of 1..K multipliers at each σ.

        ``relative_spread`` is the run-to-run standard deviation over the mean
        infidelity. Each run sums many independent pulse errors, so it falls
        as the pulse count grows.
        """
        config = self._config
        if multipliers is None:
            multipliers = range(1, self.compiled.n_multipliers + 1)
        rows = []
        for k in multipliers:
            sub = config.model_copy(update={"circuit": CircuitMode(kind="truncated", multipliers=k)})
            counts = compiled_for(sub).modexp_counts
            exposure = exposure_for(sub)
            for sigma in config.sigmas:
                mean_eps = config.mean_eps_for(sigma)
                logger.info("Operations sweep: %d multipliers, sigma=%s", k, sigma)
                fidelities = self._map_runs(partial(_run_fidelity, sub, sigma))
                mean, std = _mean_std(fidelities)
                infidelity = 1.0 - mean
                spread = std / infidelity if infidelity > NOISELESS_FIDELITY_TOL else None
                rows.append(
                    (
                        k,
                        sigma,
                        mean_eps,
                        len(fidelities),
                        counts.n_erroneous,
                        exposure.n_t,
                        exposure.n_cm,
                        mean,
                        std,
                        metrics.mean_fidelity_systematic_estimate(
                            exposure.n_t, exposure.n_cm, config.l, mean_eps, sigma
                        ),
                        spread,
                    )
                )
        return [self._writer.write_csv("operations_sweep.csv", OPERATIONS_HEADER, rows)]

    def run_counts(self) -> list[Path]:
        """Pulse tallies of the configured circuit."""
        c = self.pulse_counts
        row = (c.n_resonant, c.n_sideband, c.n_aux, c.n_erroneous, c.n_total, c.erroneous_fraction)
        return [*self._dump_program(), self._writer.write_csv("counts.csv", COUNTS_HEADER, [row])]

    def close(self) -> None:
        """Drop cached ensemble results."""
        self._results = {}

    def __enter__(self) -> ExperimentRunner:
        return self

    def __exit__(self, *args: Any) -> None:
        self.close()


def run_fig1(config: ExperimentConfig) -> list[Path]:
    return ExperimentRunner(config).run_fig1()


def run_fig2(config: ExperimentConfig) -> list[Path]:
    return ExperimentRunner(config).run_fig2()


def run_watchdog_study(config: ExperimentConfig) -> list[Path]:
    return ExperimentRunner(config).run_watchdog_study()


def run_operations_sweep(config: ExperimentConfig) -> list[Path]:
    return ExperimentRunner(config).run_operations_sweep()
