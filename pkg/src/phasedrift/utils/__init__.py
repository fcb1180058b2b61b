"""Utility modules for the phasedrift simulator."""

from phasedrift.utils.artifacts import ArtifactWriter
from phasedrift.utils.logging import configure_logging

__all__ = ["ArtifactWriter", "configure_logging"]
