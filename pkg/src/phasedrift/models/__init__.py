"""Pydantic models for the phasedrift simulator."""

from phasedrift.models.circuit import CheckpointMark, Circuit, Gate, GateKind
from phasedrift.models.config import CircuitMode, ExperimentConfig
from phasedrift.models.metrics import EnsembleResult, ErrorExposure
from phasedrift.models.noise import NoiseModel
from phasedrift.models.pulse import Pulse, PulseCounts, PulseKind, PulseSequence
from phasedrift.models.shor import FactoringInstance, MeasurementRecord, Stage
from phasedrift.models.state import BasisLabel
from phasedrift.models.watchdog import Checkpoint, WatchdogMode, WatchdogOutcome, WatchdogSchedule

__all__ = [
    "BasisLabel",
    "Checkpoint",
    "CheckpointMark",
    "Circuit",
    "CircuitMode",
    "EnsembleResult",
    "ErrorExposure",
    "ExperimentConfig",
    "FactoringInstance",
    "Gate",
    "GateKind",
    "MeasurementRecord",
    "NoiseModel",
    "Pulse",
    "PulseCounts",
    "PulseKind",
    "PulseSequence",
    "Stage",
    "WatchdogMode",
    "WatchdogOutcome",
    "WatchdogSchedule",
]
