"""Command line entry points."""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import host
from .scenario import Scenario, ScenarioError
from .sevenseg import encode_digit
from .sim import SimOutput, expected_rotations, run
from .uart import UartBitstream, UartConfig, rx_bytes

DISPLAY_FILE = "display.trace"
BITS_FILE = "uart.bits"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2


def decode_output(out: SimOutput, cfg: UartConfig) -> host.ShiftLog:
    """Receive the run's serial line on the host and fold it into a log."""
    rx = rx_bytes(out.bitstream, cfg)
    log = host.ShiftLog()
    # feed byte by byte so every record carries the arrival time of its newline
    for b, t in zip(rx.data, rx.byte_times):
        log.feed(bytes([b]), received_at=t)
    log.close()
    return log


def output_files(out: SimOutput, cfg: UartConfig) -> dict[str, bytes]:
    records = decode_output(out, cfg).records
    return {
        host.RECORDS_FILE: host.records_jsonl(records).encode(),
        host.SUMMARY_FILE: host.summary_csv(records).encode(),
        DISPLAY_FILE: out.display_trace_text().encode(),
        BITS_FILE: out.bitstream.dumps().encode(),
    }


def _load(path: str) -> Scenario | None:
    try:
        return Scenario.load(path)
    except ScenarioError as exc:
        print(f"invalid scenario {path}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
    return None


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    if scenario is None:
        return EXIT_INVALID
    out = run(scenario)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, data in output_files(out, scenario.uart).items():
        (outdir / name).write_bytes(data)
    for t, msg in out.errors:
        print(f"runtime error at {t} us: {msg}", file=sys.stderr)
    print(f"{len(out.records)} record(s), {out.total_count} rotation(s) -> {outdir}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        records = host.load_records(args.records)
    except (OSError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(host.report(records).format_table())
    return EXIT_OK


def cmd_uart_decode(args: argparse.Namespace) -> int:
    try:
        stream = UartBitstream.loads(Path(args.bits).read_text(encoding="utf-8"))
        cfg = UartConfig(args.baud)
    except (OSError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    rx = rx_bytes(stream, cfg)
    print(f"{len(rx.data)} byte(s):")
    sys.stdout.write(rx.data.decode("ascii", errors="backslashreplace"))
    if rx.data and not rx.data.endswith(b"\n"):
        print()
    for err in rx.errors:
        print(f"framing error at {err.at} us: {err.message}")
    return EXIT_OK


def verify(scenario: Scenario) -> list[tuple[str, bool, str]]:
    """Run the scenario twice and check the simulator's end-to-end invariants."""
    out = run(scenario)
    checks = []

    saturated = any(b.saturated for b in out.final_state.buffers)
    per_seg = [
        (got, expected_rotations([seg]))
        for got, seg in zip(out.edge_count_per_segment, scenario.segments)
    ]
    seg_ok = all(abs(got - want) <= 1 for got, want in per_seg)
    edges = sum(out.edge_count_per_segment)
    sum_ok = out.total_count == edges or (saturated and out.total_count < edges)
    checks.append((
        "counter matches rotation oracle",
        seg_ok and sum_ok,
        f"counted {out.total_count}, edges {edges}, expected {expected_rotations(scenario.segments)}",
    ))

    rx = rx_bytes(out.bitstream, scenario.uart)
    log = host.ingest(rx.data)
    wire_ok = log.records == list(out.records) and not rx.errors and log.reject_count == 0
    checks.append((
        "wire fidelity",
        wire_ok,
        f"{len(out.records)} emitted, {len(log.records)} received, "
        f"{len(rx.errors)} framing error(s), {log.reject_count} reject(s)",
    ))

    first = output_files(out, scenario.uart)
    second = output_files(run(scenario), scenario.uart)
    digest = {k: hashlib.sha256(v).hexdigest() for k, v in first.items()}
    same = all(hashlib.sha256(second[k]).hexdigest() == h for k, h in digest.items())
    checks.append(("determinism", same, f"{len(digest)} files compared by sha256"))
    return checks


def cmd_verify(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario)
    if scenario is None:
        return EXIT_INVALID
    checks = verify(scenario)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_FAIL


def cmd_encode_digit(args: argparse.Namespace) -> int:
    try:
        mask = encode_digit(args.digit)
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return EXIT_FAIL
    print(f"0x{mask.byte:02X}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loom-monitor", description="Loom efficiency monitor emulator and host tools."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write its output files")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="summarize a records.jsonl file")
    p.add_argument("records")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("uart-decode", help="decode a uart.bits line trace")
    p.add_argument("bits")
    p.add_argument("--baud", type=int, default=9600)
    p.set_defaults(func=cmd_uart_decode)

    p = sub.add_parser("verify", help="run a scenario and check its invariants")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode-digit", help="print the segment mask of a digit")
    p.add_argument("digit", type=int)
    p.set_defaults(func=cmd_encode_digit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
