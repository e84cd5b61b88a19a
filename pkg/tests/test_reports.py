"""Tests for report models and writers."""
import json

import pytest

from app.reports import CheckRecord, VerifyReport, load_report, summarize, write_atomic


def _report(model, passed=True):
    checks = [
        CheckRecord.residual("braid", 0.0, 1e-10),
        CheckRecord.equals("||P^3|| = 6", 6.0 if passed else 5.0, 6.0, 1e-6),
    ]
    return VerifyReport(model=model, window="0..2", nmax=3, seed=0, tolerance=1e-10, checks=checks)


def test_check_record_factories():
    assert CheckRecord.residual("r", 1e-12, 1e-10).passed
    assert not CheckRecord.residual("r", 1e-3, 1e-10).passed
    assert CheckRecord.inequality("i", 1.0, 1.0, 0.0).passed
    assert CheckRecord.at_least("a", 0.9, 1.0, 0.2).passed
    rec = CheckRecord.equals("e", 120.0000001, 120.0, 1e-6)
    assert rec.passed and rec.expected == 120.0


def test_verify_report_json_has_schema():
    report = _report("fermi")
    data = json.loads(report.to_json())
    assert data["schema"] == "1"
    assert data["seed"] == 0
    assert [c["name"] for c in data["checks"]] == ["braid", "||P^3|| = 6"]
    assert report.passed


def test_report_round_trip(tmp_path):
    path = write_atomic(tmp_path / "sub" / "r.json", _report("bose").to_json())
    assert load_report(path) == _report("bose")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["r.json"]


def test_summarize_counts_failures(tmp_path):
    a = write_atomic(tmp_path / "a.json", _report("bose").to_json())
    b = write_atomic(tmp_path / "b.json", _report("fermi", passed=False).to_json())
    c = write_atomic(tmp_path / "c.json", _report("fermi").to_json())
    summary = summarize([a, b, c])
    rows = {m.model: m for m in summary.models}
    assert rows["bose"].checks == 2 and rows["bose"].failed == 0
    assert rows["fermi"].reports == 2 and rows["fermi"].failed == 1
    assert summary.failed_checks == ["b.json:fermi:||P^3|| = 6"]
    assert not summary.passed


def test_summarize_empty_list():
    summary = summarize([])
    assert summary.models == [] and summary.passed
