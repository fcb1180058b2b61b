"""Tests for the pulse models."""

import math

import pytest
from pydantic import ValidationError

from phasedrift.models.pulse import TWO_PI, Pulse, PulseCounts, PulseKind, PulseSequence
from phasedrift.models.state import BasisLabel


class TestPulse:
    """Tests for Pulse."""

    def test_resonant(self):
        """Test the resonant constructor."""
        pulse = Pulse.resonant(2, math.pi / 2, 0.5)
        assert (pulse.kind, pulse.ion, pulse.theta, pulse.phi) == (PulseKind.RESONANT, 2, math.pi / 2, 0.5)
        assert pulse.erroneous

    def test_phase_wrapped(self):
        """Test φ is reduced into [0, 2π)."""
        assert Pulse.sideband(0, 1.0, -math.pi / 2).phi == pytest.approx(3 * math.pi / 2)
        assert Pulse.resonant(0, 1.0, TWO_PI + 0.25).phi == pytest.approx(0.25)

    def test_auxiliary_pulses_are_perfect(self):
        """Test that auxiliary pulses are never erroneous."""
        assert not Pulse.aux_2pi(1).erroneous
        assert not Pulse(kind=PulseKind.AUX_PHASE, ion=1, phi=0.3, erroneous=True).erroneous
        assert Pulse.aux_2pi(1).theta is None

    def test_missing_angles(self):
        """Test that resonant pulses need both angles."""
        with pytest.raises(ValidationError):
            Pulse(kind=PulseKind.RESONANT, ion=0, theta=1.0)

    def test_non_finite_angle(self):
        """Test that NaN angles are rejected."""
        with pytest.raises(ValidationError):
            Pulse.resonant(0, float("nan"), 0.0)

    def test_negative_ion(self):
        """Test that ion indices are non-negative."""
        with pytest.raises(ValidationError):
            Pulse.aux_2pi(-1)

    def test_frozen(self):
        """Test pulses are immutable."""
        pulse = Pulse.aux_2pi(0)
        with pytest.raises(ValidationError):
            pulse.ion = 3

    def test_to_line(self):
        """Test the dump format."""
        assert Pulse.resonant(1, 0.5, 0.25).to_line() == "resonant,1,0.5,0.25,true"
        assert Pulse.aux_2pi(4).to_line() == "aux2pi,4,,,false"


class TestPulseSequence:
    """Tests for PulseSequence."""

    def test_counts(self):
        """Test per-kind tallies."""
        seq = PulseSequence.of(
            Pulse.resonant(0, 1.0, 0.0),
            Pulse.sideband(0, 1.0, 0.0),
            Pulse.aux_2pi(1),
            Pulse.aux_phase(1, 0.5),
        )
        assert (seq.n_resonant, seq.n_sideband, seq.n_aux) == (1, 1, 2)

    def test_concat_and_add(self):
        """Test composition keeps order."""
        a = PulseSequence.of(Pulse.resonant(0, 1.0, 0.0))
        b = PulseSequence.of(Pulse.aux_2pi(1))
        assert [p.kind for p in a + b] == [PulseKind.RESONANT, PulseKind.AUX_2PI]
        assert len(PulseSequence.concat([a, b, a])) == 3

    def test_dump_lines(self):
        """Test one line per pulse."""
        seq = PulseSequence.of(Pulse.aux_2pi(0), Pulse.aux_2pi(1))
        assert seq.dump_lines() == ["aux2pi,0,,,false", "aux2pi,1,,,false"]


class TestPulseCounts:
    """Tests for PulseCounts."""

    def test_derived(self):
        """Test erroneous and total counts."""
        counts = PulseCounts(n_resonant=3, n_sideband=2, n_aux=1)
        assert counts.n_erroneous == 5
        assert counts.n_total == 6
        assert counts.erroneous_fraction == pytest.approx(5 / 6)

    def test_add(self):
        """Test componentwise addition."""
        total = PulseCounts(n_resonant=1) + PulseCounts(n_sideband=2, n_aux=3)
        assert total.as_tuple() == (1, 2, 3, 3, 6)

    def test_negative_rejected(self):
        """Test counts are non-negative."""
        with pytest.raises(ValidationError):
            PulseCounts(n_aux=-1)


class TestBasisLabel:
    """Tests for BasisLabel."""

    def test_index(self):
        """Test the CM is the least significant index bit."""
        assert BasisLabel(qubit_bits=0b101, cm=1).index() == 0b1011

    def test_from_index(self):
        """Test decoding."""
        label = BasisLabel.from_index(0b1011)
        assert (label.qubit_bits, label.cm) == (0b101, 1)

    def test_cm_is_one_bit(self):
        """Test the CM label is 0 or 1."""
        with pytest.raises(ValidationError):
            BasisLabel(qubit_bits=0, cm=2)
