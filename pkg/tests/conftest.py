from __future__ import annotations

import random

import pytest

from loom_monitor.scenario import OperatorEvent, Scenario, Segment
from loom_monitor.signal_chain import SensorConfig
from loom_monitor.soc_core import ShiftConfig, ThumbwheelState

# number -> (title, passed)
_ACCEPTANCE: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, [title, True])
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}")


def random_scenario(
    rng: random.Random,
    *,
    max_segments: int = 4,
    max_duration_s: float = 300.0,
    noise: bool = False,
    shifts: tuple[str, ...] = ("A", "B", "C"),
    buttons: bool = True,
) -> Scenario:
    """A valid scenario with fractional-second segment lengths and operator traffic."""
    operate = round(rng.uniform(1.0, 10.0), 3)
    release = round(rng.uniform(0.1, operate - 0.05), 3)
    sensor = SensorConfig(operate, release)
    margin = sensor.window_mT / 2
    segments = []
    for _ in range(rng.randint(1, max_segments)):
        rpm = 0 if rng.random() < 0.2 else rng.randint(1, 999)
        amp = rng.uniform(0, margin * 0.999) if noise else 0.0
        duration = round(rng.uniform(0.5, max_duration_s), 6)
        segments.append(Segment(duration, rpm, amp))
    total_s = sum(s.duration_us for s in segments) / 1e6
    events = []
    for _ in range(rng.randint(0, 6)):
        t = round(rng.uniform(0, total_s), 3)
        kind = rng.choice(["SelectShift", "EfficiencyButton", "SetThumbwheel"] if buttons else ["SelectShift"])
        if kind == "SelectShift":
            events.append(OperatorEvent(t, kind, shift_id=rng.choice(shifts)))
        elif kind == "SetThumbwheel":
            events.append(OperatorEvent(t, kind, wheels=ThumbwheelState.from_value(rng.randint(1, 999)).wheels))
        else:
            events.append(OperatorEvent(t, kind))
    events.sort(key=lambda e: e.t_us)
    return Scenario(
        rated_rpm=rng.randint(1, 999),
        shifts=tuple(ShiftConfig(s, rng.randint(1, 12)) for s in shifts),
        thumbwheel=ThumbwheelState.from_value(rng.randint(1, 999)),
        sensor=sensor,
        segments=tuple(segments),
        events=tuple(events),
        seed=rng.randint(0, 2**31),
    )
