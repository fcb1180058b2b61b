"""CSV and text artifact writers."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
import numpy.typing as npt

from phasedrift.exceptions import ArtifactWriteError

logger = logging.getLogger(__name__)

Cell = str | int | float | None


def format_cell(value: Cell) -> str:
    """Floats with 17 significant digits so files round-trip exactly."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


class ArtifactWriter:
    """Writes experiment artifacts below one output directory."""

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _ensure_dir(self) -> None:
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ArtifactWriteError(str(self.out_dir), f"Could not create output directory: {exc}") from exc

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> Path:
        self._ensure_dir()
        target = self.path(name)
        try:
            with target.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_cell(cell) for cell in row])
        except OSError as exc:
            raise ArtifactWriteError(str(target), f"Could not write CSV: {exc}") from exc
        logger.info("Wrote %s", target)
        return target

    def write_distribution(self, name: str, distribution: npt.NDArray[np.float64]) -> Path:
        """``c,probability`` with one row per register value."""
        rows = ((c, float(p)) for c, p in enumerate(distribution))
        return self.write_csv(name, ("c", "probability"), rows)

    def write_joint(self, name: str, joint: npt.NDArray[np.float64]) -> Path:
        """``j,x,probability`` for a joint table indexed [j, x]."""
        rows = (
            (j, x, float(joint[j, x])) for j in range(joint.shape[0]) for x in range(joint.shape[1])
        )
        return self.write_csv(name, ("j", "x", "probability"), rows)

    def write_lines(self, name: str, lines: Iterable[str]) -> Path:
        self._ensure_dir()
        target = self.path(name)
        try:
            with target.open("w", encoding="utf-8") as handle:
                for line in lines:
                    handle.write(line)
                    handle.write("\n")
        except OSError as exc:
            raise ArtifactWriteError(str(target), f"Could not write file: {exc}") from exc
        logger.info("Wrote %s", target)
        return target
