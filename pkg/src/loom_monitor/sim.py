"""Event-driven virtual-time run of a whole scenario.

Time jumps from one interesting instant to the next (field samples, edges,
operator events, display hold expiry), so an 8 hour shift costs a few
hundred thousand steps instead of 2.9e10 microsecond ticks.

Field model per revolution of a running segment, revolution ``k`` starting
at ``segment_start + floor(k * 60e6 / rpm)``:

* magnet dwell, the first 10 % of the nominal period: the field sits just
  above the operate point;
* the rest of the revolution: the field sits just below the release point.

Each phase starts with one clean sample at the nominal level. With noise
enabled, a few extra samples follow in every phase, offset by a seeded
pseudo-random amount bounded by the segment's ``noise_amp_mT``. Those
samples wander into the hysteresis window but never cross the opposite
threshold, so they must not change the edge stream.
"""

from __future__ import annotations

import heapq
import random
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .monitor import (
    EFFICIENCY_HOLD_US,
    DisplayRequest,
    EfficiencyButton,
    Event,
    MonitorState,
    RotationEdge,
    SelectShift,
    SetThumbwheel,
    Tick,
    drain_tx,
    monitor_step,
)
from .scenario import Scenario, Segment
from .sevenseg import SegmentFrame, render_efficiency, render_error, render_meters
from .signal_chain import (
    Edge,
    EdgeKind,
    LogicLevel,
    SensorConfig,
    SensorState,
    condition,
    conditioned_levels,
    detect_edges,
)
from .soc_core import ShiftRecord, ThumbwheelState
from .uart import UartBitstream, tx_bytes, tx_end

US_PER_MIN = 60_000_000
DWELL_FRACTION = 10  # dwell = period // DWELL_FRACTION
JITTER_SAMPLES = 3  # noisy samples per phase when noise is enabled

_PRIO_OPERATOR = 0
_PRIO_TICK = 1
_PRIO_EDGE = 2


def segment_bounds(segments: Sequence[Segment]) -> list[tuple[int, int]]:
    bounds = []
    t = 0
    for seg in segments:
        end = t + seg.duration_us
        bounds.append((t, end))
        t = end
    return bounds


def field_samples(
    segments: Sequence[Segment], sensor: SensorConfig, seed: int = 0
) -> Iterator[tuple[int, float]]:
    """Timestamped flux density samples for the whole run."""
    rng = random.Random(seed)
    offset = sensor.window_mT / 8
    present = sensor.operate_mT + offset
    absent = sensor.release_mT - offset

    def phase(start: int, end: int, level: float, amp: float) -> Iterator[tuple[int, float]]:
        yield start, level
        if amp <= 0:
            return
        last = start
        span = end - start
        for j in range(1, JITTER_SAMPLES + 1):
            t = start + j * span // (JITTER_SAMPLES + 1)
            if last < t < end:
                yield t, level + rng.uniform(-amp, amp)
                last = t

    for seg, (start, end) in zip(segments, segment_bounds(segments)):
        amp = seg.noise_amp_mT
        rpm = seg.actual_rpm
        if rpm == 0:
            yield from phase(start, end, absent, amp)
            continue
        dwell = US_PER_MIN // rpm // DWELL_FRACTION
        k = 0
        while True:
            t0 = start + k * US_PER_MIN // rpm
            if t0 + dwell >= end:
                break
            nxt = min(start + (k + 1) * US_PER_MIN // rpm, end)
            yield from phase(t0, t0 + dwell, present, amp)
            yield from phase(t0 + dwell, nxt, absent, amp)
            k += 1


def pulse_train(segments: Sequence[Segment], sensor: SensorConfig, seed: int = 0) -> Iterator[Edge]:
    """Edges of the conditioned sensor line."""
    idle = condition(SensorState().output)
    return detect_edges(conditioned_levels(field_samples(segments, sensor, seed), sensor), idle)


def expected_rotations(segments: Sequence[Segment]) -> int:
    """Whole revolutions the shaft makes over all segments."""
    return sum(seg.duration_us * seg.actual_rpm // US_PER_MIN for seg in segments)


def render(request: DisplayRequest) -> SegmentFrame:
    if request.kind == "meters":
        return render_meters(request.value)
    if request.kind == "efficiency":
        return render_efficiency(request.value)
    return render_error(request.value)


@dataclass(frozen=True)
class SimOutput:
    records: tuple[ShiftRecord, ...]
    display_trace: tuple[tuple[int, SegmentFrame], ...]
    bitstream: UartBitstream
    edge_count_per_segment: tuple[int, ...]
    final_state: MonitorState
    errors: tuple[tuple[int, str], ...] = ()

    def display_trace_text(self) -> str:
        return "".join(f"{t},{frame.hex()}\n" for t, frame in self.display_trace)

    @property
    def total_count(self) -> int:
        return sum(b.count for b in self.final_state.buffers)


def _operator_event(ev, t: int) -> Event:
    if ev.action == "SelectShift":
        return SelectShift(ev.shift_id, t)
    if ev.action == "SetThumbwheel":
        return SetThumbwheel(ThumbwheelState(tuple(ev.wheels)), t)
    return EfficiencyButton(t)


def run(scenario: Scenario) -> SimOutput:
    """Run a scenario to completion, including any UART traffic it queued."""
    state = MonitorState.initial(scenario.rated_rpm, scenario.shifts, scenario.thumbwheel)

    bounds = segment_bounds(scenario.segments)
    edge_counts = [0] * len(bounds)
    seg_idx = 0

    rising = (
        e for e in pulse_train(scenario.segments, scenario.sensor, scenario.seed)
        if e.kind is EdgeKind.RISING
    )
    operator = [_operator_event(ev, ev.t_us) for ev in scenario.events]
    op_idx = 0
    ticks: list[tuple[int, int]] = []  # (t, seq)
    tick_seq = 0

    records: list[ShiftRecord] = []
    errors: list[tuple[int, str]] = []
    transitions: list[tuple[int, LogicLevel]] = []
    uart_free = 0

    last_request = state.current_display()
    trace = [(0, render(last_request))]

    next_edge = next(rising, None)
    while True:
        candidates = []
        if op_idx < len(operator):
            candidates.append((operator[op_idx].t, _PRIO_OPERATOR))
        if ticks:
            candidates.append((ticks[0][0], _PRIO_TICK))
        if next_edge is not None:
            candidates.append((next_edge.at, _PRIO_EDGE))
        if not candidates:
            break
        t, prio = min(candidates)

        if prio == _PRIO_OPERATOR:
            event: Event = operator[op_idx]
            op_idx += 1
        elif prio == _PRIO_TICK:
            heapq.heappop(ticks)
            event = Tick(t)
        else:
            event = RotationEdge(t)
            while bounds[seg_idx][1] <= t:
                seg_idx += 1
            edge_counts[seg_idx] += 1
            next_edge = next(rising, None)

        try:
            state, effects = monitor_step(state, event)
        except ValueError as exc:
            errors.append((t, f"{type(event).__name__}: {exc}"))
            continue

        if effects.error is not None:
            errors.append((t, effects.error))
        if effects.record is not None:
            records.append(effects.record)
        if isinstance(event, EfficiencyButton):
            heapq.heappush(ticks, (t + EFFICIENCY_HOLD_US, tick_seq))
            tick_seq += 1
        if state.pending_tx:
            state, data = drain_tx(state)
            start = max(t, uart_free)
            transitions.extend(tx_bytes(data, scenario.uart, start).transitions)
            uart_free = tx_end(len(data), scenario.uart, start)
        if effects.display != last_request:
            last_request = effects.display
            frame = render(last_request)
            if frame != trace[-1][1]:
                trace.append((t, frame))

    return SimOutput(
        records=tuple(records),
        display_trace=tuple(trace),
        bitstream=UartBitstream(tuple(transitions)),
        edge_count_per_segment=tuple(edge_counts),
        final_state=state,
        errors=tuple(errors),
    )
