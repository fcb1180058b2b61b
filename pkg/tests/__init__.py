"""Tests for phasedrift."""
