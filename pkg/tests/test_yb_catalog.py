"""Tests for the Yang-Baxter operator catalog."""
import numpy as np
import pytest

from app.errors import PreconditionError, UnknownKindError
from app.yb_catalog import (
    HECKE_Q,
    Kind,
    ModeWindow,
    build_standard,
    commutant_residual,
    reflection_conjugate,
    translation_covariance_residual,
    transposition,
    transpositions,
    verify_bounded_below,
    verify_braid,
    verify_hecke,
    verify_selfadjoint,
)
from tests.conftest import ALL_KINDS


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_catalog_relations_on_three_modes(kind, window3):
    t = build_standard(kind, window3)
    assert verify_selfadjoint(t) <= 1e-10
    assert verify_braid(t) <= 1e-10
    assert verify_hecke(t) <= 1e-10
    assert verify_bounded_below(t) <= 1e-10


def test_hecke_parameters():
    assert HECKE_Q[Kind.BOSE] == HECKE_Q[Kind.FERMI] == 1
    for kind in (Kind.FREE, Kind.BOOLEAN, Kind.MONOTONE, Kind.ANTIMONOTONE):
        assert HECKE_Q[kind] == 0


def test_unknown_kind():
    with pytest.raises(UnknownKindError):
        build_standard("anyonic", ModeWindow(0, 1))


def test_bose_flip_coefficients(window2):
    t = build_standard("bose", window2)
    # T(e_0 (x) e_1) = e_1 (x) e_0
    assert t.coefficient(0, 1, 1, 0) == 1
    assert t.coefficient(0, 1, 0, 1) == 0


def test_monotone_is_diagonal_on_ordered_pairs(window3):
    t = build_standard("monotone", window3)
    assert t.coefficient(2, 1, 2, 1) == -1
    assert t.coefficient(1, 1, 1, 1) == -1
    assert t.coefficient(0, 2, 0, 2) == 0


def test_wrong_hecke_parameter_leaves_residual(window2):
    t = build_standard("fermi", window2)
    assert verify_hecke(t, q=0) > 0.5


def test_window_parse_and_index():
    w = ModeWindow.parse("-1..4")
    assert (w.lo, w.hi, w.d) == (-1, 4, 6)
    assert w.index(0) == 1
    assert str(w) == "-1..4"
    with pytest.raises(ValueError):
        ModeWindow.parse("3")
    with pytest.raises(ValueError):
        ModeWindow(2, 1)
    with pytest.raises(ValueError):
        w.index(5)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_translation_covariance(kind):
    t = build_standard(kind, ModeWindow(0, 3))
    assert translation_covariance_residual(t) == 0.0


@pytest.mark.parametrize("kind", ["free", "bose", "fermi", "boolean"])
def test_permutations_commute_with_symmetric_kinds(kind, window3):
    t = build_standard(kind, window3)
    for _, u in transpositions(window3):
        assert commutant_residual(t, u) <= 1e-12


def test_monotone_breaks_permutation_symmetry(window3):
    t = build_standard("monotone", window3)
    assert commutant_residual(t, transposition(window3, 0, 1)) > 0.5


def test_commutant_rejects_non_unitary(window2):
    t = build_standard("free", window2)
    with pytest.raises(PreconditionError):
        commutant_residual(t, np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_reflection_swaps_monotone_and_antimonotone():
    w = ModeWindow(-2, 2)
    reflected = reflection_conjugate(build_standard("monotone", w))
    assert reflected.kind is Kind.ANTIMONOTONE
    assert np.array_equal(reflected.matrix, build_standard("antimonotone", w).matrix)


def test_reflection_needs_symmetric_window():
    with pytest.raises(PreconditionError):
        reflection_conjugate(build_standard("monotone", ModeWindow(0, 2)))
