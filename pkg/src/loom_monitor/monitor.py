"""Keyboard/display state machine of the loom monitor.

``monitor_step`` is pure: it takes a state snapshot and one event and
returns the next snapshot plus the effects the step requests (what the
display should show, which bytes went onto the transmit queue). Replaying
an event list therefore reproduces both the final state and the effects.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Literal, Union

from .soc_core import (
    MAX_RPM,
    ConfigurationError,
    InvalidBCDError,
    RotationBuffer,
    ShiftConfig,
    ShiftRecord,
    ThumbwheelState,
    bcd_to_binary,
    count_rotation,
    length_cm,
)
from .uart import frame_record

# Efficiency stays on the display this long after the button, then live meters return.
EFFICIENCY_HOLD_US = 5_000_000

ERR_PICK_ZERO = 1
ERR_INVALID_BCD = 2


class UnknownShiftError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class DisplayRequest:
    kind: Literal["meters", "efficiency", "error"]
    value: int


@dataclass(frozen=True, slots=True)
class RotationEdge:
    t: int


@dataclass(frozen=True, slots=True)
class SelectShift:
    shift_id: str
    t: int


@dataclass(frozen=True, slots=True)
class EfficiencyButton:
    t: int


@dataclass(frozen=True, slots=True)
class SetThumbwheel:
    wheels: ThumbwheelState
    t: int


@dataclass(frozen=True, slots=True)
class Tick:
    t: int


Event = Union[RotationEdge, SelectShift, EfficiencyButton, SetThumbwheel, Tick]


@dataclass(frozen=True, slots=True)
class Effects:
    display: DisplayRequest
    tx: bytes = b""
    record: ShiftRecord | None = None
    error: str | None = None


@dataclass(frozen=True, slots=True)
class MonitorState:
    """Snapshot of the chip.

    ``held`` is the efficiency (or error) reading on the display while the
    hold window runs; ``None`` means the display shows live meters.
    """

    rated_rpm: int
    hours: tuple[tuple[str, int], ...]
    active_shift: str
    buffers: tuple[RotationBuffer, ...]
    thumbwheel: ThumbwheelState = ThumbwheelState()
    held: DisplayRequest | None = None
    hold_until: int | None = None
    pending_tx: bytes = b""
    last_t: int = 0

    @classmethod
    def initial(
        cls,
        rated_rpm: int,
        shifts: Sequence[ShiftConfig],
        thumbwheel: ThumbwheelState = ThumbwheelState(),
    ) -> MonitorState:
        if not 1 <= rated_rpm <= MAX_RPM:
            raise ValueError(f"rated_rpm {rated_rpm} outside 1..{MAX_RPM}")
        if not shifts:
            raise ValueError("at least one shift must be configured")
        ids = [s.shift_id for s in shifts]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate shift ids in {ids}")
        return cls(
            rated_rpm=rated_rpm,
            hours=tuple((s.shift_id, s.hours) for s in shifts),
            active_shift=shifts[0].shift_id,
            buffers=tuple(RotationBuffer.for_shift(s) for s in shifts),
            thumbwheel=thumbwheel,
        )

    @property
    def display_mode(self) -> str:
        return "live" if self.held is None else "efficiency"

    def buffer(self, shift_id: str) -> RotationBuffer:
        for b in self.buffers:
            if b.shift_id == shift_id:
                return b
        raise UnknownShiftError(f"shift {shift_id!r} is not configured")

    def shift_hours(self, shift_id: str) -> int:
        return dict(self.hours)[shift_id]

    def live_display(self) -> DisplayRequest:
        try:
            pick = bcd_to_binary(self.thumbwheel)
            return DisplayRequest("meters", length_cm(self.buffer(self.active_shift).count, pick))
        except InvalidBCDError:
            return DisplayRequest("error", ERR_INVALID_BCD)
        except ConfigurationError:
            return DisplayRequest("error", ERR_PICK_ZERO)

    def current_display(self) -> DisplayRequest:
        return self.held if self.held is not None else self.live_display()


def monitor_step(state: MonitorState, event: Event) -> tuple[MonitorState, Effects]:
    """Advance the monitor by one event.

    Raises:
        ValueError: the event is older than the previous one.
        InvalidBCDError: SetThumbwheel carried a nibble above 9.
        UnknownShiftError: SelectShift named a shift with no buffer.
    """
    if event.t < state.last_t:
        raise ValueError(f"event at {event.t} us arrived after {state.last_t} us")

    if isinstance(event, RotationEdge):
        buffers = tuple(
            count_rotation(b) if b.shift_id == state.active_shift else b for b in state.buffers
        )
        # built directly: this is the per-rotation hot path
        state = MonitorState(
            state.rated_rpm, state.hours, state.active_shift, buffers, state.thumbwheel,
            state.held, state.hold_until, state.pending_tx, event.t,
        )
        return state, Effects(state.current_display())

    state = replace(state, last_t=event.t)

    if isinstance(event, SelectShift):
        state.buffer(event.shift_id)
        state = replace(state, active_shift=event.shift_id)
        return state, Effects(state.current_display())

    if isinstance(event, SetThumbwheel):
        bcd_to_binary(event.wheels)
        state = replace(state, thumbwheel=event.wheels)
        return state, Effects(state.current_display())

    if isinstance(event, Tick):
        if state.hold_until is not None and event.t >= state.hold_until:
            state = replace(state, held=None, hold_until=None)
        return state, Effects(state.current_display())

    if isinstance(event, EfficiencyButton):
        shift_id = state.active_shift
        count = state.buffer(shift_id).count
        hold_until = event.t + EFFICIENCY_HOLD_US
        try:
            record = ShiftRecord.compute(
                shift_id,
                count,
                pick=bcd_to_binary(state.thumbwheel),
                rated_rpm=state.rated_rpm,
                hours=state.shift_hours(shift_id),
            )
        except InvalidBCDError as exc:
            held = DisplayRequest("error", ERR_INVALID_BCD)
            state = replace(state, held=held, hold_until=hold_until)
            return state, Effects(held, error=str(exc))
        except ConfigurationError as exc:
            held = DisplayRequest("error", ERR_PICK_ZERO)
            state = replace(state, held=held, hold_until=hold_until)
            return state, Effects(held, error=str(exc))
        frame = frame_record(record)
        held = DisplayRequest("efficiency", record.efficiency_bp)
        state = replace(
            state, held=held, hold_until=hold_until, pending_tx=state.pending_tx + frame
        )
        return state, Effects(held, tx=frame, record=record)

    raise TypeError(f"unknown monitor event {event!r}")


def drain_tx(state: MonitorState) -> tuple[MonitorState, bytes]:
    """Hand the queued bytes to the transmitter."""
    return replace(state, pending_tx=b""), state.pending_tx
