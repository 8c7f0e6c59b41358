"""Declarative simulation input, loaded from JSON.

Example::

    {
      "rated_rpm": 200,
      "shifts": [{"shift_id": "A", "hours": 8}],
      "thumbwheel": {"wheels": [0, 5, 0]},
      "uart": {"baud": 9600},
      "sensor": {"operate_mT": 3.0, "release_mT": 1.5},
      "segments": [
        {"duration_s": 23040, "actual_rpm": 200, "noise_amp_mT": 0.0},
        {"duration_s": 5760, "actual_rpm": 0}
      ],
      "events": [{"t_s": 28800, "action": "EfficiencyButton"}],
      "seed": 0
    }

Unknown keys are rejected at every level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from .signal_chain import SensorConfig
from .soc_core import MAX_RPM, ShiftConfig, ThumbwheelState
from .uart import UartConfig

US_PER_S = 1_000_000

ACTIONS = ("SelectShift", "EfficiencyButton", "SetThumbwheel")


class ScenarioError(ValueError):
    pass


def seconds_to_us(seconds: Any) -> int:
    """Convert decimal seconds to integer microseconds, rounding half-even."""
    if isinstance(seconds, bool):
        raise ScenarioError(f"not a time in seconds: {seconds!r}")
    try:
        d = Decimal(str(seconds))
    except InvalidOperation:
        raise ScenarioError(f"not a time in seconds: {seconds!r}") from None
    if not d.is_finite():
        raise ScenarioError(f"not a finite time: {seconds!r}")
    return int((d * US_PER_S).to_integral_value(ROUND_HALF_EVEN))


@dataclass(frozen=True, slots=True)
class Segment:
    """A stretch of constant shaft speed; ``actual_rpm == 0`` means stopped."""

    duration_s: float | int | Decimal
    actual_rpm: int
    noise_amp_mT: float = 0.0

    @property
    def duration_us(self) -> int:
        return seconds_to_us(self.duration_s)


@dataclass(frozen=True, slots=True)
class OperatorEvent:
    t_s: float | int | Decimal
    action: str
    shift_id: str | None = None
    wheels: tuple[int, int, int] | None = None

    @property
    def t_us(self) -> int:
        return seconds_to_us(self.t_s)


@dataclass(frozen=True)
class Scenario:
    rated_rpm: int
    shifts: tuple[ShiftConfig, ...]
    thumbwheel: ThumbwheelState = ThumbwheelState()
    uart: UartConfig = UartConfig()
    sensor: SensorConfig = SensorConfig()
    segments: tuple[Segment, ...] = ()
    events: tuple[OperatorEvent, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "shifts", tuple(self.shifts))
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "events", tuple(self.events))
        self.validate()

    @property
    def total_us(self) -> int:
        return sum(s.duration_us for s in self.segments)

    def validate(self) -> None:
        if not _is_int(self.rated_rpm) or not 1 <= self.rated_rpm <= MAX_RPM:
            raise ScenarioError(f"rated_rpm must be an integer in 1..{MAX_RPM}")
        if not self.shifts:
            raise ScenarioError("at least one shift is required")
        ids = [s.shift_id for s in self.shifts]
        if len(set(ids)) != len(ids):
            raise ScenarioError(f"duplicate shift ids: {ids}")
        if not _is_int(self.seed):
            raise ScenarioError("seed must be an integer")

        margin = self.sensor.window_mT / 2
        for i, seg in enumerate(self.segments):
            if seg.duration_us <= 0:
                raise ScenarioError(f"segment {i}: duration_s must be positive")
            if not _is_int(seg.actual_rpm) or not 0 <= seg.actual_rpm <= MAX_RPM:
                raise ScenarioError(f"segment {i}: actual_rpm must be an integer in 0..{MAX_RPM}")
            if not 0 <= seg.noise_amp_mT < margin:
                raise ScenarioError(
                    f"segment {i}: noise_amp_mT must be in [0, {margin}) for this sensor"
                )

        total = self.total_us
        prev = 0
        for i, ev in enumerate(self.events):
            t = ev.t_us
            if not 0 <= t <= total:
                raise ScenarioError(f"event {i}: t_s outside the scenario's 0..{total / US_PER_S} s")
            if t < prev:
                raise ScenarioError(f"event {i}: events must be ordered by t_s")
            prev = t
            if ev.action not in ACTIONS:
                raise ScenarioError(f"event {i}: unknown action {ev.action!r}")
            if ev.action == "SelectShift":
                if ev.shift_id not in ids:
                    raise ScenarioError(f"event {i}: shift_id {ev.shift_id!r} is not configured")
            elif ev.shift_id is not None:
                raise ScenarioError(f"event {i}: shift_id only applies to SelectShift")
            if ev.action == "SetThumbwheel":
                try:
                    ThumbwheelState(tuple(ev.wheels or ()))
                except ValueError as exc:
                    raise ScenarioError(f"event {i}: {exc}") from None
            elif ev.wheels is not None:
                raise ScenarioError(f"event {i}: wheels only applies to SetThumbwheel")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Scenario:
        _check_keys(data, "scenario", {"rated_rpm", "shifts"}, set(_SCENARIO_KEYS))
        try:
            shifts = tuple(
                ShiftConfig(**_checked(s, "shift", {"shift_id", "hours"}, set()))
                for s in _list(data["shifts"], "shifts")
            )
            thumbwheel = ThumbwheelState(
                tuple(_checked(data.get("thumbwheel", {"wheels": [0, 0, 0]}), "thumbwheel", {"wheels"}, set())["wheels"])
            )
            uart = UartConfig(**_checked(data.get("uart", {}), "uart", set(), {"baud", "format"}))
            sensor = SensorConfig(
                **_checked(data.get("sensor", {}), "sensor", set(), {"operate_mT", "release_mT"})
            )
            segments = tuple(
                Segment(**_checked(s, "segment", {"duration_s", "actual_rpm"}, {"noise_amp_mT"}))
                for s in _list(data.get("segments", []), "segments")
            )
            events = []
            for ev in _list(data.get("events", []), "events"):
                ev = _checked(ev, "event", {"t_s", "action"}, {"shift_id", "wheels"})
                if ev.get("wheels") is not None:
                    ev["wheels"] = tuple(ev["wheels"])
                events.append(OperatorEvent(**ev))
            return cls(
                rated_rpm=data["rated_rpm"],
                shifts=shifts,
                thumbwheel=thumbwheel,
                uart=uart,
                sensor=sensor,
                segments=segments,
                events=tuple(events),
                seed=data.get("seed", 0),
            )
        except ScenarioError:
            raise
        except (TypeError, ValueError) as exc:
            raise ScenarioError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> Scenario:
        try:
            data = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        data = _undecimal(data)
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_dict(self) -> dict[str, Any]:
        def num(x: Any) -> Any:
            return float(x) if isinstance(x, Decimal) else x

        return {
            "rated_rpm": self.rated_rpm,
            "shifts": [{"shift_id": s.shift_id, "hours": s.hours} for s in self.shifts],
            "thumbwheel": {"wheels": list(self.thumbwheel.wheels)},
            "uart": {"baud": self.uart.baud},
            "sensor": {"operate_mT": self.sensor.operate_mT, "release_mT": self.sensor.release_mT},
            "segments": [
                {
                    "duration_s": num(s.duration_s),
                    "actual_rpm": s.actual_rpm,
                    "noise_amp_mT": num(s.noise_amp_mT),
                }
                for s in self.segments
            ],
            "events": [
                {
                    "t_s": num(e.t_s),
                    "action": e.action,
                    **({"shift_id": e.shift_id} if e.shift_id is not None else {}),
                    **({"wheels": list(e.wheels)} if e.wheels is not None else {}),
                }
                for e in self.events
            ],
            "seed": self.seed,
        }


_SCENARIO_KEYS = (
    "rated_rpm", "shifts", "thumbwheel", "uart", "sensor", "segments", "events", "seed",
)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _list(value: Any, what: str) -> list[Any]:
    if not isinstance(value, list):
        raise ScenarioError(f"{what} must be a list")
    return value


def _check_keys(obj: Any, what: str, required: set[str], allowed: set[str]) -> None:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{what} must be an object")
    missing = required - obj.keys()
    if missing:
        raise ScenarioError(f"{what}: missing field(s) {sorted(missing)}")
    unknown = obj.keys() - required - allowed
    if unknown:
        raise ScenarioError(f"{what}: unknown field(s) {sorted(unknown)}")


def _checked(obj: Any, what: str, required: set[str], optional: set[str]) -> dict[str, Any]:
    _check_keys(obj, what, required, optional)
    return dict(obj)


def _undecimal(obj: Any, key: str | None = None) -> Any:
    # Times stay exact Decimals; every other non-integer number becomes a float.
    if isinstance(obj, dict):
        return {k: _undecimal(v, k) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_undecimal(v, key) for v in obj]
    if isinstance(obj, Decimal) and key not in ("duration_s", "t_s"):
        return float(obj)
    return obj
