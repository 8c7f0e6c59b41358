"""Hall-effect proximity switch and signal conditioner.

The switch is a comparator with hysteresis on magnetic flux density:

    field >= operate_mT  -> output LOW   (magnet present)
    field <= release_mT  -> output HIGH  (magnet absent)
    otherwise            -> output held

The conditioner inverts the active-low switch output so every magnet pass
shows up as one HIGH pulse, whose rising edge is one shaft rotation.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator
from dataclasses import dataclass


class LogicLevel(enum.Enum):
    LOW = 0
    HIGH = 1

    def __invert__(self) -> LogicLevel:
        return LogicLevel.HIGH if self is LogicLevel.LOW else LogicLevel.LOW


class EdgeKind(enum.Enum):
    RISING = "rising"
    FALLING = "falling"


@dataclass(frozen=True, slots=True)
class SensorConfig:
    """Switching thresholds of the proximity switch, in milliTesla."""

    operate_mT: float = 3.0
    release_mT: float = 1.5

    def __post_init__(self) -> None:
        if not (self.operate_mT > 0 and self.release_mT > 0):
            raise ValueError("sensor thresholds must be positive")
        if not self.operate_mT > self.release_mT:
            raise ValueError(
                f"operate_mT ({self.operate_mT}) must exceed release_mT ({self.release_mT})"
            )

    @property
    def window_mT(self) -> float:
        """Width of the hysteresis window."""
        return self.operate_mT - self.release_mT


@dataclass(frozen=True, slots=True)
class SensorState:
    output: LogicLevel = LogicLevel.HIGH
    last_field_mT: float = 0.0


@dataclass(frozen=True, slots=True)
class Edge:
    kind: EdgeKind
    at: int  # microseconds


def sensor_step(
    state: SensorState, field_mT: float, config: SensorConfig
) -> tuple[SensorState, LogicLevel]:
    """Feed one flux density sample through the switch.

    Returns:
        The new state and the (raw, active-low) output level.
    """
    if field_mT >= config.operate_mT:
        output = LogicLevel.LOW
    elif field_mT <= config.release_mT:
        output = LogicLevel.HIGH
    else:
        output = state.output
    return SensorState(output, field_mT), output


def condition(raw: LogicLevel) -> LogicLevel:
    """Signal conditioner transfer: invert the active-low switch output."""
    return ~raw


def detect_edges(
    samples: Iterable[tuple[int, LogicLevel]], initial: LogicLevel | None = None
) -> Iterator[Edge]:
    """Yield an Edge for every level change in a conditioned sample stream.

    Works lazily so it can sit on top of a generator of samples covering
    hours of simulated time. ``initial`` is the line level before the first
    sample; when given, a first sample that differs from it is an edge.
    Raises ValueError as soon as a sample time fails to increase.
    """
    prev_t: int | None = None
    prev_level = initial
    for t, level in samples:
        if prev_t is not None and t <= prev_t:
            raise ValueError(f"sample times must strictly increase ({prev_t} then {t})")
        if prev_level is not None and level is not prev_level:
            kind = EdgeKind.RISING if level is LogicLevel.HIGH else EdgeKind.FALLING
            yield Edge(kind, t)
        prev_t, prev_level = t, level


def conditioned_levels(
    fields: Iterable[tuple[int, float]],
    config: SensorConfig,
    state: SensorState | None = None,
) -> Iterator[tuple[int, LogicLevel]]:
    """Run timestamped field samples through switch and conditioner."""
    state = state or SensorState()
    for t, field in fields:
        state, raw = sensor_step(state, field, config)
        yield t, condition(raw)
