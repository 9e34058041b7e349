"""Metrics counters, derived ratios, conservation and CSV output."""

import pytest

from rismsim.config import ScenarioConfig
from rismsim.metrics import AccountingError, CSV_HEADER, Metrics
from rismsim.packets import DATA, Packet


def data_pkt(origin=0, seq=1):
    return Packet(DATA, origin=origin, final_dest=9, seq=seq, payload_size=64)


def test_pdr_and_overhead_ratios():
    m = Metrics()
    for i in range(10):
        m.record_sent(data_pkt(seq=i))
    for i in range(9):
        m.record_received(data_pkt(seq=i))
    m.record_drop(data_pkt(seq=9), "behavior")
    for _ in range(5):
        m.record_control()
    report = m.finalize()
    assert report.pdr == 0.9
    assert report.overhead_ratio == 0.5
    assert report.drops_by_cause["behavior"] == 1


def test_zero_sent_ratios_are_zero():
    report = Metrics().finalize()
    assert report.pdr == 0.0
    assert report.overhead_ratio == 0.0
    assert report.overhead_ratio_with_ids == 0.0


def test_conservation_with_in_flight():
    m = Metrics()
    for i in range(4):
        m.record_sent(data_pkt(seq=i))
    m.record_received(data_pkt(seq=0))
    m.record_drop(data_pkt(seq=1), "queue")
    report = m.finalize()  # seq 2, 3 still outstanding
    assert report.in_flight == 2
    assert report.data_sent == (report.data_received + report.drops_total
                                + report.in_flight)


def test_double_settle_raises():
    m = Metrics()
    m.record_sent(data_pkt(seq=1))
    m.record_received(data_pkt(seq=1))
    with pytest.raises(AccountingError):
        m.record_drop(data_pkt(seq=1), "noroute")


def test_duplicate_origination_raises():
    m = Metrics()
    m.record_sent(data_pkt(seq=1))
    with pytest.raises(AccountingError):
        m.record_sent(data_pkt(seq=1))


def test_knock_flagged_packets_excluded():
    m = Metrics()
    probe = Packet(DATA, origin=0, final_dest=2, seq=5, knock_flag=True)
    m.record_sent(probe)
    m.record_received(probe)
    report = m.finalize()
    assert report.data_sent == 0
    assert report.data_received == 0


def test_warning_counted_separately_from_control():
    m = Metrics()
    m.record_sent(data_pkt(seq=1))
    m.record_received(data_pkt(seq=1))
    m.record_control()
    m.record_warning()
    report = m.finalize()
    assert report.control_generated == 1
    assert report.warning_count == 1
    assert report.overhead_ratio == 1.0
    assert report.overhead_ratio_with_ids == 2.0


def test_csv_row_matches_header():
    m = Metrics()
    m.record_sent(data_pkt(seq=1))
    m.record_received(data_pkt(seq=1))
    cfg = ScenarioConfig(nodes=20, malicious_fraction=0.3, pause_time=100.0,
                         protocol="dsr")
    row = m.finalize().csv_row(7, 42, cfg)
    fields = row.split(",")
    assert len(fields) == len(CSV_HEADER.split(","))
    assert fields[0] == "7"
    assert fields[1] == "42"
    assert fields[2] == "dsr"
    assert fields[3] == "20"
    assert fields[4] == "30"     # malicious percentage
    assert fields[5] == "100"    # pause time
    assert fields[6] == "10"     # connections derived from 20 nodes
    assert fields[9] == "1.000000"  # pdr
