"""Tests for the dense linear algebra helpers."""
import numpy as np
import pytest

from app import linalg_core
from app.errors import NonHermitianError
from app.linalg_core import (
    BoundCheck,
    hermitian_eig,
    kron,
    operator_norm,
    power_kron,
    psd_residual,
    rank,
    unitary_residual,
)


def test_kron_index_convention():
    a = np.arange(4).reshape(2, 2)
    b = np.arange(9).reshape(3, 3)
    k = kron(a, b)
    assert k.shape == (6, 6)
    assert k[1 * 3 + 2, 0 * 3 + 1] == a[1, 0] * b[2, 1]


def test_operator_norm_zero_and_empty():
    assert operator_norm(np.zeros((3, 3))) == 0.0
    assert operator_norm(np.zeros((0, 0))) == 0.0


def test_operator_norm_matches_largest_singular_value(rng):
    a = rng.standard_normal((7, 5)) + 1j * rng.standard_normal((7, 5))
    assert operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-12)


def test_operator_norm_iterative_path(rng, monkeypatch):
    monkeypatch.setattr(linalg_core.settings, "dense_norm_max_dim", 4)
    a = rng.standard_normal((12, 12))
    assert operator_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-8)


def test_hermitian_eig_rank_and_order():
    a = np.diag([3.0, 0.0, 1.0, 1e-14])
    report = hermitian_eig(a)
    assert report.rank == 2
    assert report.operator_norm == pytest.approx(3.0)
    assert list(report.eigenvalues[:2]) == pytest.approx([3.0, 1.0])


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_rank_of_zero_matrix():
    assert rank(np.zeros((4, 4))) == 0


def test_psd_residual():
    assert psd_residual(np.diag([1.0, 0.0])) == 0.0
    assert psd_residual(np.diag([1.0, -0.5])) == pytest.approx(0.5)


def test_unitary_residual_of_permutation():
    assert unitary_residual(np.eye(3)[[2, 0, 1]]) == pytest.approx(0.0, abs=1e-15)


def test_power_kron_dimensions():
    assert power_kron(np.eye(2), 0).shape == (1, 1)
    assert power_kron(np.eye(2), 3).shape == (8, 8)


def test_bound_check():
    assert BoundCheck(1.0, 1.0, 0.0).passed
    assert not BoundCheck(1.1, 1.0, 1e-3).passed
    assert BoundCheck(0.5, 1.0, 0.0).slack == pytest.approx(0.5)
