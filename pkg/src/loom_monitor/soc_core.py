"""On-chip arithmetic: thumbwheel BCD conversion, rotation buffers, calculators.

Everything here is exact integer arithmetic. Efficiency is held in basis
points (1/100 of a percent) and cloth length in centimeters, so both
calculators are the usual formulas scaled by 100 and truncated:

    efficiency_bp = floor(count * 10000 / (rpm * 60 * hours))
    length_cm     = floor(count * 10000 / (pick * 3937))

39.37 inches per meter is carried as the rational 3937/100.
"""

from __future__ import annotations

from dataclasses import dataclass

SHIFT_IDS = ("A", "B", "C")

MAX_RPM = 999
MAX_PICK = 999
MAX_HOURS = 12
# Capacity of a 12 hour buffer with the shaft at full speed.
MAX_BUFFER_VALUE = MAX_RPM * 60 * MAX_HOURS

INCH_PER_METER_X100 = 3937


class InvalidBCDError(ValueError):
    """A thumbwheel line carried a nibble outside 0-9."""


class ConfigurationError(ValueError):
    """A calculator was asked to divide by a zero rpm, hour count or pick."""


def check_shift_id(shift_id: str) -> str:
    if shift_id not in SHIFT_IDS:
        raise ValueError(f"unknown shift {shift_id!r}, expected one of {SHIFT_IDS}")
    return shift_id


def buffer_capacity(hours: int) -> int:
    return MAX_RPM * 60 * hours


@dataclass(frozen=True, slots=True)
class ThumbwheelState:
    """Raw nibbles read from the three wheels, hundreds first.

    A nibble is any 4-bit value; digits above 9 are representable here so
    that a faulty switch reaches ``bcd_to_binary`` and is rejected there.
    """

    wheels: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        wheels = tuple(self.wheels)
        if len(wheels) != 3 or any(not isinstance(w, int) or not 0 <= w <= 0xF for w in wheels):
            raise ValueError(f"thumbwheel needs three 4-bit nibbles, got {self.wheels!r}")
        object.__setattr__(self, "wheels", wheels)

    @classmethod
    def from_value(cls, n: int) -> ThumbwheelState:
        if not 0 <= n <= 999:
            raise ValueError(f"{n} does not fit three decimal wheels")
        return cls((n // 100, n // 10 % 10, n % 10))


def bcd_to_binary(thumbwheel: ThumbwheelState) -> int:
    """Convert the three BCD wheels to the pick value they dial in."""
    value = 0
    for nibble in thumbwheel.wheels:
        if nibble > 9:
            raise InvalidBCDError(f"invalid BCD nibble 0x{nibble:X} in {thumbwheel.wheels}")
        value = value * 10 + nibble
    return value


@dataclass(frozen=True, slots=True)
class ShiftConfig:
    shift_id: str
    hours: int

    def __post_init__(self) -> None:
        check_shift_id(self.shift_id)
        if not isinstance(self.hours, int) or not 1 <= self.hours <= MAX_HOURS:
            raise ValueError(f"shift hours must be in 1..{MAX_HOURS}, got {self.hours}")


@dataclass(frozen=True, slots=True)
class RotationBuffer:
    """Saturating rotation counter for one shift."""

    shift_id: str
    capacity: int
    count: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.capacity <= MAX_BUFFER_VALUE:
            raise ValueError(f"capacity {self.capacity} outside 1..{MAX_BUFFER_VALUE}")
        if not 0 <= self.count <= self.capacity:
            raise ValueError(f"count {self.count} outside 0..{self.capacity}")

    @classmethod
    def for_shift(cls, shift: ShiftConfig) -> RotationBuffer:
        return cls(shift.shift_id, buffer_capacity(shift.hours))

    @property
    def saturated(self) -> bool:
        return self.count == self.capacity


def count_rotation(buffer: RotationBuffer) -> RotationBuffer:
    if buffer.count >= buffer.capacity:
        return buffer
    return RotationBuffer(buffer.shift_id, buffer.capacity, buffer.count + 1)


def efficiency_bp(count: int, rated_rpm: int, hours: int) -> int:
    """Shift efficiency in basis points, truncated.

    Not clamped: a shaft running faster than its rating reports above
    10000 bp.
    """
    if rated_rpm <= 0 or hours <= 0:
        raise ConfigurationError(f"efficiency undefined for rpm={rated_rpm}, hours={hours}")
    return count * 10000 // (rated_rpm * 60 * hours)


def length_cm(count: int, pick: int) -> int:
    """Woven length in centimeters for ``count`` picks at ``pick`` picks per inch."""
    if pick <= 0:
        raise ConfigurationError(f"length undefined for pick value {pick}")
    return count * 10000 // (pick * INCH_PER_METER_X100)


@dataclass(frozen=True, slots=True)
class ShiftRecord:
    """One shift's results plus the configuration they were computed from."""

    shift_id: str
    count: int
    efficiency_bp: int
    length_cm: int
    pick: int
    rated_rpm: int
    hours: int

    def __post_init__(self) -> None:
        check_shift_id(self.shift_id)
        if not 1 <= self.hours <= MAX_HOURS:
            raise ValueError(f"hours {self.hours} outside 1..{MAX_HOURS}")
        if not 1 <= self.rated_rpm <= MAX_RPM:
            raise ValueError(f"rated_rpm {self.rated_rpm} outside 1..{MAX_RPM}")
        if not 1 <= self.pick <= MAX_PICK:
            raise ValueError(f"pick {self.pick} outside 1..{MAX_PICK}")
        if not 0 <= self.count <= buffer_capacity(self.hours):
            raise ValueError(f"count {self.count} exceeds the {self.hours} h buffer")
        if self.efficiency_bp < 0 or self.length_cm < 0:
            raise ValueError("efficiency and length must be non-negative")

    @classmethod
    def compute(cls, shift_id: str, count: int, pick: int, rated_rpm: int, hours: int) -> ShiftRecord:
        return cls(
            shift_id=shift_id,
            count=count,
            efficiency_bp=efficiency_bp(count, rated_rpm, hours),
            length_cm=length_cm(count, pick),
            pick=pick,
            rated_rpm=rated_rpm,
            hours=hours,
        )

    def is_consistent(self) -> bool:
        """True when efficiency and length match the calculators."""
        return (
            self.efficiency_bp == efficiency_bp(self.count, self.rated_rpm, self.hours)
            and self.length_cm == length_cm(self.count, self.pick)
        )
