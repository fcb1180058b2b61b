"""Tests for phasedrift data models."""
