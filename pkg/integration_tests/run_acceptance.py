#!/usr/bin/env python3
"""Acceptance harness for phasedrift.

Simulates the full 18-ion n=15 register and checks the end-to-end behavior
of the noise, entropy and watchdog experiments. Takes tens of minutes with
the default 20 runs per ensemble.
"""

import math
import os
import statistics
import sys
import tempfile
from pathlib import Path

# Add the src directory to the path for development
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import numpy as np

from phasedrift import (
    ExperimentConfig,
    ExperimentRunner,
    FactoringInstance,
    QuantumState,
    Stage,
)
from phasedrift import metrics, shor
from phasedrift.harness import (
    compiled_for,
    exposure_for,
    ideal_for,
    simulate_run,
    supervised_run,
)
from phasedrift.models.pulse import Pulse
from phasedrift.models.watchdog import WatchdogMode
from phasedrift.pulse import apply_pulse
from phasedrift.statevec import register_distribution
from phasedrift.utils import configure_logging

IDEAL_PEAKS = [0, 64, 128, 192]


def test_noiseless_end_to_end(out_dir: Path) -> None:
    """Noiseless 18-ion run against the analytic states."""
    print("Testing noiseless end-to-end correctness...")
    config = ExperimentConfig(sigmas=(0.0,), runs=1, out_dir=out_dir)
    inst = config.instance()
    pre, post = simulate_run(config, 0.0, 0, through_qft=True)
    f = metrics.fidelity(pre, ideal_for(config, Stage.PRE_FT))
    assert f >= 1 - 1e-8, f"pre-FT fidelity {f}"
    print(f"  ✓ Pre-FT fidelity {f:.12f}")
    pc = register_distribution(post, inst.register1)
    error = float(np.max(np.abs(pc - shor.analytic_pc(inst))))
    assert error <= 1e-8, f"max P(c) error {error}"
    assert shor.find_peaks(pc) == IDEAL_PEAKS
    print(f"  ✓ P(c) matches the closed form (max error {error:.2e}), peaks {IDEAL_PEAKS}")


def test_classical_pipeline() -> None:
    """Order and factors from the ideal peaks."""
    print("Testing classical post-processing...")
    inst = FactoringInstance()
    r = shor.extract_order(IDEAL_PEAKS, inst)
    assert r == 4, f"order {r}"
    factors = shor.factors_from_order(inst, r)
    assert factors == (3, 5), f"factors {factors}"
    print(f"  ✓ r={r}, factors {factors}")


def test_fidelity_and_entropy(out_dir: Path, runs: int, jobs: int) -> None:
    """Monte-Carlo fidelity and linear entropy against the closed-form estimates."""
    print(f"Testing fidelity and entropy estimates ({runs} runs per sigma)...")
    config = ExperimentConfig(sigmas=(0.001, 0.005, 0.01), runs=runs, jobs=jobs, out_dir=out_dir)
    counts = compiled_for(config).modexp_counts
    exposure = exposure_for(config)
    n_t, n_cm = exposure.n_t, exposure.n_cm
    print(
        f"  ✓ {counts.n_erroneous} erroneous pulses ({counts.n_sideband} sideband), "
        f"exposure n_t={n_t:.0f} n_cm={n_cm:.0f}"
    )
    with ExperimentRunner(config) as runner:
        runner.run_fig2()
        results = runner.results
    for sigma, result in results.items():
        estimate = metrics.mean_fidelity_estimate(n_t, n_cm, config.l, sigma)
        tolerance = max(3 * result.standard_error, 0.05)
        gap = abs(result.mean_fidelity - estimate)
        assert gap <= tolerance, f"sigma={sigma}: MC {result.mean_fidelity} vs estimate {estimate}"
        print(f"  ✓ sigma={sigma}: mean fidelity {result.mean_fidelity:.4f} vs estimate {estimate:.4f}")
    for sigma in (0.005, 0.01):
        slin = results[sigma].slin_mc
        assert slin is not None
        estimate = metrics.finite_ensemble_entropy(
            metrics.linear_entropy_estimate(n_t, n_cm, config.l, sigma), runs
        )
        tolerance = max(0.15 * estimate, 0.5)
        assert abs(slin - estimate) <= tolerance, f"sigma={sigma}: S_lin {slin} vs {estimate}"
        print(f"  ✓ sigma={sigma}: linear entropy {slin:.3f} vs estimate {estimate:.3f}")


def test_signal_loss(out_dir: Path) -> None:
    """Flattened P(c) at large dispersion, surviving peaks at 1%."""
    print("Testing signal loss...")
    config = ExperimentConfig(sigmas=(0.01, 0.05), runs=1, out_dir=out_dir)
    inst = config.instance()
    pre, post = simulate_run(config, 0.05, 0, through_qft=True)
    pc = register_distribution(post, inst.register1)
    contrast = metrics.peak_contrast(pc, IDEAL_PEAKS)
    f = metrics.fidelity(pre, ideal_for(config))
    assert contrast < 2.0, f"contrast {contrast}"
    assert f < 0.01, f"fidelity {f}"
    print(f"  ✓ sigma=0.05: contrast {contrast:.3f}, fidelity {f:.2e}")
    _, post = simulate_run(config, 0.01, 0, through_qft=True)
    weight = metrics.peak_weight(register_distribution(post, inst.register1), IDEAL_PEAKS)
    assert weight >= 0.5, f"peak weight {weight}"
    print(f"  ✓ sigma=0.01: peak weight {weight:.3f}")


def test_watchdog(out_dir: Path, runs: int) -> None:
    """Paired off / partial / full-projection runs on the truncated circuit."""
    print(f"Testing watchdog study ({runs} paired runs)...")
    config = ExperimentConfig.for_watchdog_study(sigmas=(0.001,), runs=runs, out_dir=out_dir)
    means = {}
    for mode in WatchdogMode:
        values = [
            supervised_run(config, 0.001, run, mode).watchdog_fidelity for run in range(runs)
        ]
        means[mode] = statistics.fmean(values)
        print(f"  ✓ {mode.value}: mean {means[mode]:.4f}")
    off, partial, project = means[WatchdogMode.OFF], means[WatchdogMode.PARTIAL], means[WatchdogMode.PROJECT]
    assert project > partial >= off, f"ordering {project} > {partial} >= {off}"
    assert project >= 0.95, f"full projection {project}"
    assert 0 < partial - off < 0.1, f"improvement {partial - off}"
    print(f"  ✓ Ordering holds, improvement {partial - off:.4f}")


def test_properties(out_dir: Path) -> None:
    """Norm drift and parallel reproducibility."""
    print("Testing properties...")
    rng = np.random.default_rng(7)
    state = QuantumState.zero(6)
    for _ in range(1000):
        ion = int(rng.integers(0, 6))
        theta, phi = rng.uniform(0, 2 * math.pi, size=2)
        if rng.random() < 0.5:
            apply_pulse(state, Pulse.resonant(ion, float(theta), float(phi)))
        else:
            apply_pulse(state, Pulse.sideband(ion, float(theta), float(phi)))
    drift = abs(state.norm() - 1.0)
    assert drift < 1e-9, f"norm drift {drift}"
    print(f"  ✓ Norm drift {drift:.2e} after 1000 pulses")
    base = {"n": 5, "y": 2, "q_bits": 5, "sigmas": (0.0, 0.01), "runs": 4}
    serial = ExperimentRunner(ExperimentConfig(**base, out_dir=out_dir / "serial")).run_fig2()
    parallel = ExperimentRunner(
        ExperimentConfig(**base, jobs=3, out_dir=out_dir / "parallel")
    ).run_fig2()
    assert serial[-1].read_bytes() == parallel[-1].read_bytes()
    print("  ✓ Sweep CSV identical for 1 and 3 workers")


def test_systematic_estimate(out_dir: Path, runs: int) -> None:
    """Systematic-shift estimate against the truncated circuit."""
    print("Testing systematic-shift estimate...")
    assert metrics.mean_fidelity_systematic_estimate(
        15_000, 10_000, 18, 0.0, 0.01
    ) == metrics.mean_fidelity_estimate(15_000, 10_000, 18, 0.01)
    print("  ✓ Reduces to the random-error estimate at zero shift")
    config = ExperimentConfig(
        sigmas=(0.0,), mean_eps=0.001, runs=runs, circuit="truncated:3", out_dir=out_dir
    )
    counts = compiled_for(config).modexp_counts
    fidelities = [
        metrics.fidelity(simulate_run(config, 0.0, run)[0], ideal_for(config)) for run in range(runs)
    ]
    mean = statistics.fmean(fidelities)
    se = statistics.stdev(fidelities) / math.sqrt(runs) if runs > 1 else 0.0
    naive = metrics.mean_fidelity_systematic_estimate(
        counts.n_erroneous, counts.n_sideband, config.l, 0.001, 0.0
    )
    assert mean >= naive - 2 * se, f"measured {mean} below estimate {naive}"
    print(f"  ✓ Measured {mean:.4f} ≥ estimate {naive:.4f}")


def main():
    """Run all acceptance checks."""
    print("=" * 70)
    print("phasedrift - Acceptance Tests")
    print("=" * 70)
    print()

    runs = int(os.environ.get("PHASEDRIFT_RUNS", "20"))
    jobs = int(os.environ.get("PHASEDRIFT_JOBS", str(os.cpu_count() or 1)))
    configure_logging(int(os.environ.get("PHASEDRIFT_VERBOSE", "0")))
    print(f"Runs per ensemble: {runs}, workers: {jobs}")
    print()

    checks = [
        ("noiseless", lambda out: test_noiseless_end_to_end(out)),
        ("classical", lambda out: test_classical_pipeline()),
        ("estimates", lambda out: test_fidelity_and_entropy(out, runs, jobs)),
        ("signal-loss", lambda out: test_signal_loss(out)),
        ("watchdog", lambda out: test_watchdog(out, runs)),
        ("properties", lambda out: test_properties(out)),
        ("systematic", lambda out: test_systematic_estimate(out, runs)),
    ]
    passed = 0
    failed = 0
    with tempfile.TemporaryDirectory(prefix="phasedrift-") as tmp:
        for name, check in checks:
            try:
                check(Path(tmp) / name)
                passed += 1
            except Exception as e:
                print(f"  ✗ FAILED: {e}")
                failed += 1
            print()

    print("=" * 70)
    print(f"Results: {passed} passed, {failed} failed")
    print("=" * 70)

    sys.exit(0 if failed == 0 else 1)


if __name__ == "__main__":
    main()
