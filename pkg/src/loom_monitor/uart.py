"""Bit-level 8N1 UART over a simulated line, and the ASCII shift-record frame.

Time is integer microseconds. Bit ``i`` of a frame that starts at ``t0``
occupies ``[t0 + floor(i*1e6/baud), t0 + floor((i+1)*1e6/baud))``; every
boundary is computed from the frame origin, so rounding never accumulates
across a frame. The receiver samples bit ``j`` at
``start_edge + floor((j + 1/2)*1e6/baud)``.

Record frames look like NMEA sentences without the ``$``::

    LOOM,A,76800,8000,3901,50,200,8*59\\n

where the two hex digits are the XOR of every payload byte.
"""

from __future__ import annotations

import bisect
import re
from collections.abc import Iterable
from dataclasses import dataclass, field

from .signal_chain import LogicLevel
from .soc_core import ShiftRecord

HIGH = LogicLevel.HIGH
LOW = LogicLevel.LOW

BITS_PER_FRAME = 10
US_PER_S = 1_000_000
MIN_BAUD = 300
MAX_BAUD = 115_200


@dataclass(frozen=True, slots=True)
class UartConfig:
    baud: int = 9600
    format: str = "8N1"

    def __post_init__(self) -> None:
        if not isinstance(self.baud, int) or not MIN_BAUD <= self.baud <= MAX_BAUD:
            raise ValueError(f"baud {self.baud} outside {MIN_BAUD}..{MAX_BAUD}")
        if self.format != "8N1":
            raise ValueError(f"only 8N1 framing is supported, got {self.format!r}")

    def bit_offset(self, i: int) -> int:
        """Start of bit ``i`` relative to the frame origin, in microseconds."""
        return i * US_PER_S // self.baud

    def sample_offset(self, j: int) -> int:
        """Mid-bit sampling instant of bit ``j`` relative to the start edge."""
        return (2 * j + 1) * US_PER_S // (2 * self.baud)

    @property
    def frame_us(self) -> int:
        return self.bit_offset(BITS_PER_FRAME)


@dataclass(frozen=True, slots=True)
class UartBitstream:
    """Level changes on the line. The line idles HIGH before the first one."""

    transitions: tuple[tuple[int, LogicLevel], ...] = ()

    def __post_init__(self) -> None:
        level = HIGH
        prev_t = -1
        for t, new in self.transitions:
            if t <= prev_t:
                raise ValueError(f"transition times must strictly increase ({prev_t} then {t})")
            if new is level:
                raise ValueError(f"transition at {t} does not change the level")
            prev_t, level = t, new
        if level is not HIGH:
            raise ValueError("bitstream must end idle (HIGH)")

    @property
    def end_us(self) -> int:
        return self.transitions[-1][0] if self.transitions else 0

    def level_at(self, t: int) -> LogicLevel:
        i = bisect.bisect_right([tt for tt, _ in self.transitions], t)
        return self.transitions[i - 1][1] if i else HIGH

    def concat(self, other: UartBitstream) -> UartBitstream:
        return UartBitstream(self.transitions + other.transitions)

    def dumps(self) -> str:
        """Text form: one ``<time_us> <0|1>`` line per transition."""
        return "".join(f"{t} {level.value}\n" for t, level in self.transitions)

    @classmethod
    def loads(cls, text: str) -> UartBitstream:
        transitions = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("0", "1"):
                raise ValueError(f"line {lineno}: expected '<time_us> <0|1>', got {line!r}")
            transitions.append((int(parts[0]), LogicLevel(int(parts[1]))))
        return cls(tuple(transitions))


@dataclass(frozen=True, slots=True)
class FramingError:
    at: int  # start edge of the offending frame, microseconds
    message: str = "stop bit not HIGH"


@dataclass(frozen=True, slots=True)
class RxResult:
    data: bytes
    errors: tuple[FramingError, ...] = ()
    byte_times: tuple[int, ...] = field(default=(), compare=False)


def byte_to_bits(b: int) -> list[LogicLevel]:
    """Start bit, eight data bits LSB first, stop bit."""
    if not 0 <= b <= 0xFF:
        raise ValueError(f"not a byte: {b}")
    data = [HIGH if b >> i & 1 else LOW for i in range(8)]
    return [LOW, *data, HIGH]


def tx_bytes(data: Iterable[int], cfg: UartConfig, start_t: int = 0) -> UartBitstream:
    """Serialize bytes back to back starting at ``start_t``."""
    if start_t < 0:
        raise ValueError("start time must be non-negative")
    transitions: list[tuple[int, LogicLevel]] = []
    level = HIGH
    frame_t = start_t
    for b in data:
        for i, bit in enumerate(byte_to_bits(b)):
            if bit is not level:
                transitions.append((frame_t + cfg.bit_offset(i), bit))
                level = bit
        frame_t += cfg.frame_us
    return UartBitstream(tuple(transitions))


def tx_end(n_bytes: int, cfg: UartConfig, start_t: int) -> int:
    """Time at which the last stop bit of ``n_bytes`` ends."""
    return start_t + n_bytes * cfg.frame_us


def rx_bytes(stream: UartBitstream, cfg: UartConfig) -> RxResult:
    """Recover bytes from a line trace by mid-bit sampling.

    A frame whose stop-bit sample is LOW is reported as a framing error and
    the receiver waits for the line to go idle before hunting for the next
    start bit. Decoding never stops early.
    """
    transitions = stream.transitions
    times = [t for t, _ in transitions]

    def level_at(t: int) -> LogicLevel:
        i = bisect.bisect_right(times, t)
        return transitions[i - 1][1] if i else HIGH

    data = bytearray()
    byte_times: list[int] = []
    errors: list[FramingError] = []
    i = 0
    n = len(transitions)
    while i < n:
        t_start, level = transitions[i]
        if level is not LOW:
            i += 1
            continue
        value = 0
        for bit in range(8):
            if level_at(t_start + cfg.sample_offset(bit + 1)) is HIGH:
                value |= 1 << bit
        stop_t = t_start + cfg.sample_offset(9)
        if level_at(stop_t) is HIGH:
            data.append(value)
            byte_times.append(t_start)
            # next start edge must come after the stop sample
            i = bisect.bisect_right(times, stop_t)
        else:
            errors.append(FramingError(t_start))
            # resynchronize: skip to the line going idle again
            i = bisect.bisect_right(times, stop_t)
            while i < n and transitions[i][1] is not HIGH:
                i += 1
            i += 1
    return RxResult(bytes(data), tuple(errors), tuple(byte_times))


class FrameError(ValueError):
    """Base class for rejected record frames; ``raw`` holds the offending line."""

    reason = "malformed"

    def __init__(self, message: str, raw: bytes) -> None:
        super().__init__(f"{message}: {raw!r}")
        self.raw = raw


class MalformedFrame(FrameError):
    reason = "malformed"


class ChecksumMismatch(FrameError):
    reason = "checksum"


class FieldOutOfRange(FrameError):
    reason = "out_of_range"


FRAME_TAG = b"LOOM"
_NUMBER = re.compile(rb"0|[1-9][0-9]{0,8}")
_CHECKSUM = re.compile(rb"[0-9A-F]{2}")


def xor_checksum(payload: bytes) -> int:
    cs = 0
    for b in payload:
        cs ^= b
    return cs


def frame_record(r: ShiftRecord) -> bytes:
    payload = b",".join(
        [
            FRAME_TAG,
            r.shift_id.encode("ascii"),
            *(
                str(v).encode("ascii")
                for v in (r.count, r.efficiency_bp, r.length_cm, r.pick, r.rated_rpm, r.hours)
            ),
        ]
    )
    return payload + b"*%02X\n" % xor_checksum(payload)


def parse_frame(raw: bytes) -> ShiftRecord:
    """Decode one ``\\n``-terminated frame, rejecting anything not canonical."""
    raw = bytes(raw)
    if not raw.endswith(b"\n") or b"\n" in raw[:-1]:
        raise MalformedFrame("frame must be a single newline-terminated line", raw)
    line = raw[:-1]
    payload, star, checksum = line.rpartition(b"*")
    if not star or b"*" in payload:
        raise MalformedFrame("expected exactly one '*' before the checksum", raw)
    if not _CHECKSUM.fullmatch(checksum):
        raise MalformedFrame("checksum must be two uppercase hex digits", raw)
    if int(checksum, 16) != xor_checksum(payload):
        raise ChecksumMismatch(
            f"checksum {checksum.decode()} != {xor_checksum(payload):02X}", raw
        )
    if any(b < 0x20 or b > 0x7E for b in payload):
        raise MalformedFrame("payload holds non-printable bytes", raw)
    fields = payload.split(b",")
    if len(fields) != 8 or fields[0] != FRAME_TAG:
        raise MalformedFrame(f"expected LOOM plus 7 fields, got {len(fields) - 1}", raw)
    shift_id = fields[1].decode("ascii")
    numbers = fields[2:]
    if not all(_NUMBER.fullmatch(f) for f in numbers):
        raise MalformedFrame("numeric fields must be canonical decimal integers", raw)
    count, eff, length, pick, rpm, hours = (int(f) for f in numbers)
    try:
        record = ShiftRecord(shift_id, count, eff, length, pick, rpm, hours)
    except ValueError as exc:
        raise FieldOutOfRange(str(exc), raw) from None
    if not record.is_consistent():
        raise FieldOutOfRange("efficiency/length disagree with count and configuration", raw)
    return record
