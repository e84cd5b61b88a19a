"""Tests for the verification suites behind ``ybfock verify``."""
import pytest

from app.config import settings
from app.suites import catalog_checks, run_suite, sector_checks, symmetrizer_checks
from app.yb_catalog import Kind, ModeWindow


def _names(checks):
    return [c.name for c in checks]


def test_monotone_suite_passes():
    checks = run_suite("monotone", ModeWindow(0, 3), 3, 1e-10, 0)
    failed = [c.name for c in checks if not c.passed]
    assert failed == []
    assert "explicit monotone model = Gram model" in _names(checks)


def test_boolean_suite_has_vanishing_p2():
    checks = run_suite(Kind.BOOLEAN, ModeWindow(0, 2), 3, 1e-10, 0)
    assert all(c.passed for c in checks)
    assert "P^(2)=0" in _names(checks)


@pytest.mark.slow
def test_fermi_suite_reaches_five_particles():
    checks = run_suite("fermi", ModeWindow(0, 2), 5, 1e-10, 0)
    by_name = {c.name: c for c in checks}
    witness = by_name["||P^5|| = 120 on 5 distinct modes"]
    assert witness.passed and witness.value == pytest.approx(120.0)
    assert by_name["||R^5|| >= 5"].passed
    assert all(c.passed for c in checks)


def test_sector_checks_boolean_vanish():
    (check,) = sector_checks(Kind.BOOLEAN, 3)
    assert check.expected == 0.0 and check.passed


def test_monotone_catalog_breaks_transposition():
    checks = catalog_checks(Kind.MONOTONE, ModeWindow(0, 2), 1e-10)
    breaking = [c for c in checks if c.name.startswith("[T, U(x)U] for")]
    assert len(breaking) == 1 and breaking[0].passed
    assert any(c.name.startswith("reflection gives antimonotone") for c in checks)


@pytest.mark.parametrize("kind", ["free", "bose", "antimonotone"])
def test_catalog_checks_pass(kind):
    assert all(c.passed for c in catalog_checks(Kind.parse(kind), ModeWindow(-1, 1), 1e-10))


def test_level_rank_uses_kernel_tolerance(monkeypatch):
    def rank_check():
        checks = symmetrizer_checks(Kind.BOSE, ModeWindow(0, 2), 2, 1e-10)
        return next(c for c in checks if c.name == "rank level 1")

    check = rank_check()
    assert check.passed and check.value == 3
    monkeypatch.setattr(settings, "kernel_tolerance", 2.0)
    check = rank_check()
    assert check.value == 0 and not check.passed
