import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loom_monitor.host import (
    RECORDS_FILE,
    SUMMARY_FILE,
    Report,
    ShiftLog,
    ShiftSummary,
    ingest,
    load_records,
    persist,
    report,
)
from loom_monitor.soc_core import ShiftRecord, buffer_capacity
from loom_monitor.uart import frame_record

REC_A = ShiftRecord("A", 76800, 8000, 3901, 50, 200, 8)
REC_B = ShiftRecord.compute("B", 1000, 40, 180, 1)
REC_A2 = ShiftRecord.compute("A", 90000, 50, 200, 8)


def test_ingest_one_frame():
    log = ingest(frame_record(REC_A))
    assert log.records == [REC_A] and log.reject_count == 0


def test_ingest_bit_flip_is_one_checksum_reject():
    frame = bytearray(frame_record(REC_A))
    frame[10] ^= 0x04
    log = ingest(bytes(frame))
    assert log.records == [] and dict(log.rejects) == {"checksum": 1}


def test_ingest_resyncs_after_garbage():
    log = ingest(b"\x00\xffnoise" + frame_record(REC_A))
    assert log.records == [REC_A] and log.reject_count >= 1
    log = ingest(b"junk line\n" + frame_record(REC_A) + b"half a fra")
    assert log.records == [REC_A] and log.reject_count == 2


def test_ingest_ignores_blank_lines():
    log = ingest(b"\n\n" + frame_record(REC_A) + b"\r\n")
    assert log.records == [REC_A] and log.reject_count == 0


def test_feed_in_chunks():
    data = frame_record(REC_A) + frame_record(REC_B)
    log = ShiftLog()
    for i in range(0, len(data), 7):
        log.feed(data[i:i + 7], received_at=i)
    log.close()
    assert log.records == [REC_A, REC_B]
    assert log.entries[0].received_at is not None


@given(st.binary(max_size=200), st.binary(max_size=200))
def test_garbage_never_aborts_and_frame_survives(before, after):
    # a newline ahead of the frame guarantees the garbage cannot merge into it
    log = ingest(before + b"\n" + frame_record(REC_A) + after)
    assert REC_A in log.records


def test_persist_empty(tmp_path):
    jsonl, csv = persist(ShiftLog(), tmp_path)
    assert jsonl.read_text() == ""
    assert csv.read_text() == "shift,count,eff_bp,len_cm,pick,rpm,hours\n"


def test_persist_one_record(tmp_path):
    persist(ingest(frame_record(REC_A)), tmp_path)
    assert (tmp_path / RECORDS_FILE).read_text().count("\n") == 1
    assert (tmp_path / SUMMARY_FILE).read_text().splitlines() == [
        "shift,count,eff_bp,len_cm,pick,rpm,hours",
        "A,76800,8000,3901,50,200,8",
    ]
    assert (tmp_path / RECORDS_FILE).read_text() == (
        '{"shift_id":"A","count":76800,"efficiency_bp":8000,"length_cm":3901,'
        '"pick":50,"rated_rpm":200,"hours":8}\n'
    )


def test_persist_twice_identical(tmp_path):
    log = ingest(frame_record(REC_A) + frame_record(REC_B))
    persist(log, tmp_path / "one")
    persist(log, tmp_path / "two")
    for name in (RECORDS_FILE, SUMMARY_FILE):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_persist_reports_path_on_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        persist(ShiftLog(), blocker / "sub")


def test_persist_load_identity(tmp_path):
    rng = random.Random(3)
    records = []
    for _ in range(50):
        hours = rng.randint(1, 12)
        records.append(ShiftRecord.compute(
            rng.choice("ABC"), rng.randint(0, buffer_capacity(hours)),
            rng.randint(1, 999), rng.randint(1, 999), hours,
        ))
    log = ingest(b"".join(frame_record(r) for r in records))
    persist(log, tmp_path)
    assert load_records(tmp_path / RECORDS_FILE) == log.records == records


def test_load_rejects_foreign_keys(tmp_path):
    path = tmp_path / RECORDS_FILE
    path.write_text('{"shift_id":"A","count":1}\n')
    with pytest.raises(ValueError, match=":1:"):
        load_records(path)


def test_report_empty():
    assert report(ShiftLog()) == Report()


def test_report_two_shifts():
    rep = report(ingest(frame_record(REC_A) + frame_record(REC_B)))
    assert rep.rows == (
        ShiftSummary("A", 8000, 3901, 1),
        ShiftSummary("B", REC_B.efficiency_bp, REC_B.length_cm, 1),
    )
    assert rep.total_records == 2
    assert rep.total_length_cm == 3901 + REC_B.length_cm


def test_report_latest_wins():
    rep = report([REC_A, REC_A2])
    assert rep.rows == (ShiftSummary("A", REC_A2.efficiency_bp, REC_A2.length_cm, 2),)


def test_report_is_idempotent():
    log = ingest(frame_record(REC_A) + frame_record(REC_B))
    assert report(log) == report(log) == report(log.records)


def test_report_table():
    table = report([REC_A]).format_table()
    assert "80.00" in table and "39.01" in table
