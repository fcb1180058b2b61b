"""Command-line front-end: ``phasedrift {fig1,fig2,watchdog,operations,counts} [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from phasedrift import __version__
from phasedrift.exceptions import InvariantViolationError, PhaseDriftError
from phasedrift.harness import ExperimentRunner
from phasedrift.models.config import (
    DEFAULT_SEED,
    FIG1_SIGMAS,
    FIG2_SIGMAS,
    OPERATIONS_SIGMAS,
    WATCHDOG_MEAN_EPS_RATIO,
    WATCHDOG_MULTIPLIERS,
    WATCHDOG_SIGMAS,
    CircuitMode,
    ExperimentConfig,
)
from phasedrift.models.watchdog import WatchdogMode
from phasedrift.utils.logging import configure_logging

logger = logging.getLogger(__name__)

EXPERIMENTS = ("fig1", "fig2", "watchdog", "operations", "counts")
DEFAULT_SIGMAS = {
    "fig1": FIG1_SIGMAS,
    "fig2": FIG2_SIGMAS,
    "watchdog": WATCHDOG_SIGMAS,
    "operations": OPERATIONS_SIGMAS,
    "counts": (0.0,),
}


def _circuit_mode(text: str) -> CircuitMode:
    try:
        return CircuitMode.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasedrift",
        description="Pulse-level Monte-Carlo simulation of ion-trap Shor factoring under phase drift.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS, help="experiment to run")
    parser.add_argument("--n", type=int, default=15, help="number to factor (default: 15)")
    parser.add_argument("--y", type=int, default=7, help="coprime base (default: 7)")
    parser.add_argument("--q-bits", type=int, default=8, help="register-1 qubits, q = 2^bits")
    parser.add_argument(
        "--sigma",
        type=float,
        action="append",
        help="noise dispersion in radians; repeat for a sweep",
    )
    eps = parser.add_mutually_exclusive_group()
    eps.add_argument("--mean-eps", type=float, help="systematic shift in radians")
    eps.add_argument("--mean-eps-ratio", type=float, help="systematic shift as a multiple of sigma")
    parser.add_argument("--runs", type=int, default=20, help="noise realizations per sigma")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    parser.add_argument(
        "--circuit",
        type=_circuit_mode,
        help="full, optimized or truncated:K (watchdog default: truncated:3)",
    )
    parser.add_argument(
        "--watchdog",
        choices=[m.value for m in WatchdogMode],
        default=WatchdogMode.OFF.value,
        help="supervision of fig2 runs",
    )
    parser.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("--l", type=int, default=18, dest="l", help="independent qubits in estimates")
    parser.add_argument("--dump-pulses", action="store_true", help="write pulse and gate listings")
    parser.add_argument("--dump-state", action="store_true", help="write run-0 state amplitudes")
    parser.add_argument(
        "--shots",
        type=int,
        default=0,
        help="fig1: sample this many register-1 readouts per sigma and try to factor",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    parser.add_argument("--log-file", type=Path, help="also log to this file")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Experiment configuration with per-experiment defaults filled in."""
    watchdog_study = args.experiment == "watchdog"
    circuit = args.circuit
    if circuit is None:
        circuit = (
            CircuitMode(kind="truncated", multipliers=WATCHDOG_MULTIPLIERS)
            if watchdog_study
            else CircuitMode()
        )
    mean_eps_ratio = args.mean_eps_ratio
    if watchdog_study and args.mean_eps is None and mean_eps_ratio is None:
        mean_eps_ratio = WATCHDOG_MEAN_EPS_RATIO
    return ExperimentConfig(
        n=args.n,
        y=args.y,
        q_bits=args.q_bits,
        sigmas=tuple(args.sigma) if args.sigma else DEFAULT_SIGMAS[args.experiment],
        mean_eps=args.mean_eps,
        mean_eps_ratio=mean_eps_ratio,
        runs=args.runs,
        master_seed=args.seed,
        circuit=circuit,
        watchdog=WatchdogMode(args.watchdog),
        out_dir=args.out,
        jobs=args.jobs,
        l=args.l,
        dump_pulses=args.dump_pulses,
        dump_state=args.dump_state,
        shots=args.shots,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.log_file)

    try:
        config = config_from_args(args)
    except ValidationError as exc:
        parser.error(str(exc))

    runner = ExperimentRunner(config)
    try:
        with runner:
            if args.experiment == "fig1":
                files = runner.run_fig1()
            elif args.experiment == "fig2":
                files = runner.run_fig2()
            elif args.experiment == "watchdog":
                files = runner.run_watchdog_study()
            elif args.experiment == "operations":
                files = runner.run_operations_sweep()
            else:
                files = runner.run_counts()
                counts = runner.pulse_counts
                print(
                    f"resonant={counts.n_resonant} sideband={counts.n_sideband} aux={counts.n_aux} "
                    f"erroneous={counts.n_erroneous} total={counts.n_total} "
                    f"erroneous_fraction={counts.erroneous_fraction:.4f}"
                )
    except InvariantViolationError as exc:
        logger.error("Invariant violated: %s", exc)
        print(f"phasedrift: invariant violated: {exc}", file=sys.stderr)
        return 2
    except PhaseDriftError as exc:
        logger.error("%s", exc)
        print(f"phasedrift: {exc}", file=sys.stderr)
        return 1

    for path in files:
        print(path)
    return 0
