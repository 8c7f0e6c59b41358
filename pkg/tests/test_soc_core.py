from fractions import Fraction
from math import floor

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loom_monitor.soc_core import (
    MAX_BUFFER_VALUE,
    ConfigurationError,
    InvalidBCDError,
    RotationBuffer,
    ShiftConfig,
    ShiftRecord,
    ThumbwheelState,
    bcd_to_binary,
    buffer_capacity,
    count_rotation,
    efficiency_bp,
    length_cm,
)


# Independent oracles: the formulas evaluated in exact rationals, written the
# way they read (percent, meters, 39.37 as a decimal literal), then scaled.
def efficiency_oracle(count, rpm, hours):
    percent = Fraction(count) / (rpm * 60 * hours) * 100
    return floor(percent * 100)


def length_oracle(count, pick):
    meters = Fraction(count) / (pick * Fraction("39.37"))
    return floor(meters * 100)


def test_oracle_frozen_values():
    # values the tests below rely on, pinned once from the oracle
    assert efficiency_oracle(76800, 200, 8) == 8000
    assert efficiency_oracle(96000, 200, 8) == 10000
    assert length_oracle(76800, 50) == 3901
    assert length_oracle(3937, 10) == 1000


@pytest.mark.parametrize(
    "wheels, value", [((0, 0, 0), 0), ((1, 2, 5), 125), ((9, 9, 9), 999), ((0, 5, 0), 50)]
)
def test_bcd_examples(wheels, value):
    assert bcd_to_binary(ThumbwheelState(wheels)) == value


@pytest.mark.parametrize("wheels", [(10, 0, 0), (0, 0xF, 0), (0, 0, 0xA)])
def test_bcd_rejects_nibbles_above_nine(wheels):
    with pytest.raises(InvalidBCDError):
        bcd_to_binary(ThumbwheelState(wheels))


@pytest.mark.parametrize("wheels", [(16, 0, 0), (-1, 0, 0), (1, 2), (1, 2, 3, 4)])
def test_thumbwheel_rejects_non_nibbles(wheels):
    with pytest.raises(ValueError):
        ThumbwheelState(wheels)


def test_capacity():
    assert buffer_capacity(12) == 719280 == MAX_BUFFER_VALUE
    assert buffer_capacity(8) == 999 * 60 * 8


def test_count_rotation():
    buf = RotationBuffer.for_shift(ShiftConfig("A", 1))
    assert count_rotation(buf).count == 1
    full = RotationBuffer("A", buf.capacity, buf.capacity)
    assert count_rotation(full) == full
    assert full.saturated


def test_shift_config_bounds():
    for hours in (0, 13, 2.5):
        with pytest.raises(ValueError):
            ShiftConfig("A", hours)
    with pytest.raises(ValueError):
        ShiftConfig("D", 8)


def test_efficiency_examples():
    assert efficiency_bp(0, 200, 8) == 0
    assert efficiency_bp(96000, 200, 8) == 10000
    assert efficiency_bp(76800, 200, 8) == 8000


def test_efficiency_not_clamped():
    assert efficiency_bp(120000, 200, 8) == 12500


def test_length_examples():
    assert length_cm(0, 50) == 0
    assert length_cm(3937, 10) == 1000
    assert length_cm(76800, 50) == 3901


@pytest.mark.parametrize("rpm, hours", [(0, 8), (200, 0)])
def test_efficiency_zero_divisor(rpm, hours):
    with pytest.raises(ConfigurationError):
        efficiency_bp(10, rpm, hours)


def test_length_zero_pick():
    with pytest.raises(ConfigurationError):
        length_cm(10, 0)


@given(st.integers(0, MAX_BUFFER_VALUE), st.integers(1, 999), st.integers(1, 12))
def test_efficiency_matches_oracle(count, rpm, hours):
    assert efficiency_bp(count, rpm, hours) == efficiency_oracle(count, rpm, hours)


@given(st.integers(0, MAX_BUFFER_VALUE), st.integers(1, 999))
def test_length_matches_oracle(count, pick):
    assert length_cm(count, pick) == length_oracle(count, pick)


@given(st.integers(0, MAX_BUFFER_VALUE - 1), st.integers(1, 999), st.integers(1, 12))
def test_efficiency_monotone(count, rpm, hours):
    assert efficiency_bp(count, rpm, hours) <= efficiency_bp(count + 1, rpm, hours)


@given(st.integers(1, 999), st.integers(1, 12))
def test_full_speed_is_exactly_100_percent(rpm, hours):
    assert efficiency_bp(rpm * 60 * hours, rpm, hours) == 10000


@given(st.integers(1, 999), st.integers(0, 18))
def test_length_exact_linearity(pick, k):
    assert length_cm(k * pick * 3937, pick) == k * 10000


@given(st.integers(0, MAX_BUFFER_VALUE - 1), st.integers(1, 999))
def test_length_monotone(count, pick):
    assert length_cm(count, pick) <= length_cm(count + 1, pick)


def test_record_compute_and_consistency():
    r = ShiftRecord.compute("A", 76800, pick=50, rated_rpm=200, hours=8)
    assert (r.efficiency_bp, r.length_cm) == (8000, 3901)
    assert r.is_consistent()
    assert not ShiftRecord("A", 76800, 8001, 3901, 50, 200, 8).is_consistent()


@pytest.mark.parametrize(
    "fields",
    [
        ("D", 0, 0, 0, 1, 1, 1),
        ("A", 0, 0, 0, 0, 1, 1),
        ("A", 0, 0, 0, 1000, 1, 1),
        ("A", 0, 0, 0, 1, 0, 1),
        ("A", 0, 0, 0, 1, 1, 13),
        ("A", 59941, 0, 0, 1, 1, 1),
        ("A", 0, -1, 0, 1, 1, 1),
    ],
)
def test_record_rejects_out_of_range(fields):
    with pytest.raises(ValueError):
        ShiftRecord(*fields)
