"""PC side of the serial link: collect record frames, store them, summarize them."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .soc_core import SHIFT_IDS, ShiftRecord
from .uart import FRAME_TAG, FrameError, MalformedFrame, parse_frame

RECORDS_FILE = "records.jsonl"
SUMMARY_FILE = "summary.csv"
SUMMARY_HEADER = ("shift", "count", "eff_bp", "len_cm", "pick", "rpm", "hours")

_FRAME_START = FRAME_TAG + b","


@dataclass(frozen=True, slots=True)
class LogEntry:
    record: ShiftRecord
    received_at: int | None = None  # microseconds, when known


@dataclass
class ShiftLog:
    """Valid records in arrival order plus counts of rejected lines by reason.

    ``feed`` may be called with arbitrary chunks; a partial trailing line is
    held until its newline arrives or ``close`` is called.
    """

    entries: list[LogEntry] = field(default_factory=list)
    rejects: Counter[str] = field(default_factory=Counter)
    reject_lines: list[tuple[str, bytes]] = field(default_factory=list)
    _partial: bytes = b""

    @property
    def records(self) -> list[ShiftRecord]:
        return [e.record for e in self.entries]

    @property
    def reject_count(self) -> int:
        return sum(self.rejects.values())

    def feed(self, chunk: bytes, received_at: int | None = None) -> None:
        data = self._partial + bytes(chunk)
        *lines, self._partial = data.split(b"\n")
        for line in lines:
            self._take_line(line + b"\n", received_at)

    def close(self) -> None:
        if self._partial:
            partial, self._partial = self._partial, b""
            self._reject(MalformedFrame("unterminated frame", partial))

    def _take_line(self, line: bytes, received_at: int | None) -> None:
        if not line.strip():
            return
        # drop garbage that precedes the last frame start on the line
        start = line.rfind(_FRAME_START)
        if start > 0:
            self._reject(MalformedFrame("garbage before frame", line[:start]))
            line = line[start:]
        try:
            record = parse_frame(line)
        except FrameError as exc:
            self._reject(exc)
            return
        self.entries.append(LogEntry(record, received_at))

    def _reject(self, exc: FrameError) -> None:
        self.rejects[exc.reason] += 1
        self.reject_lines.append((exc.reason, exc.raw))


def ingest(data: bytes, log: ShiftLog | None = None) -> ShiftLog:
    """Fold a complete byte capture into a (new or existing) log."""
    log = log if log is not None else ShiftLog()
    log.feed(data)
    log.close()
    return log


def record_to_dict(record: ShiftRecord) -> dict[str, object]:
    return dataclasses.asdict(record)


def record_from_dict(obj: dict[str, object]) -> ShiftRecord:
    names = {f.name for f in dataclasses.fields(ShiftRecord)}
    if set(obj) != names:
        raise ValueError(f"record keys {sorted(obj)} != {sorted(names)}")
    return ShiftRecord(**obj)  # type: ignore[arg-type]


def records_jsonl(records: list[ShiftRecord]) -> str:
    return "".join(json.dumps(record_to_dict(r), separators=(",", ":")) + "\n" for r in records)


def summary_csv(records: list[ShiftRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    for r in records:
        writer.writerow(
            [r.shift_id, r.count, r.efficiency_bp, r.length_cm, r.pick, r.rated_rpm, r.hours]
        )
    return buf.getvalue()


def persist(log: ShiftLog, directory: str | Path) -> tuple[Path, Path]:
    """Write ``records.jsonl`` and ``summary.csv`` into ``directory``."""
    directory = Path(directory)
    records = log.records
    out = []
    for name, text in ((RECORDS_FILE, records_jsonl(records)), (SUMMARY_FILE, summary_csv(records))):
        path = directory / name
        try:
            directory.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        out.append(path)
    return out[0], out[1]


def load_records(path: str | Path) -> list[ShiftRecord]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return records


@dataclass(frozen=True, slots=True)
class ShiftSummary:
    shift_id: str
    efficiency_bp: int
    length_cm: int
    records: int


@dataclass(frozen=True, slots=True)
class Report:
    rows: tuple[ShiftSummary, ...] = ()
    total_length_cm: int = 0
    total_records: int = 0

    def format_table(self) -> str:
        lines = [f"{'shift':<6}{'efficiency %':>14}{'length m':>12}{'records':>9}"]
        for row in self.rows:
            lines.append(
                f"{row.shift_id:<6}{_hundredths(row.efficiency_bp):>14}"
                f"{_hundredths(row.length_cm):>12}{row.records:>9}"
            )
        lines.append(f"{'total':<6}{'':>14}{_hundredths(self.total_length_cm):>12}{self.total_records:>9}")
        return "\n".join(lines) + "\n"


def _hundredths(v: int) -> str:
    return f"{v // 100}.{v % 100:02d}"


def report(log: ShiftLog | list[ShiftRecord]) -> Report:
    """Latest record per shift; totals add the latest lengths and count every record."""
    records = log.records if isinstance(log, ShiftLog) else list(log)
    latest: dict[str, ShiftRecord] = {}
    counts: Counter[str] = Counter()
    for r in records:
        latest[r.shift_id] = r
        counts[r.shift_id] += 1
    rows = tuple(
        ShiftSummary(sid, latest[sid].efficiency_bp, latest[sid].length_cm, counts[sid])
        for sid in SHIFT_IDS
        if sid in latest
    )
    return Report(rows, sum(r.length_cm for r in rows), len(records))
