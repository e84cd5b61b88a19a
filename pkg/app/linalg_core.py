"""Dense complex linear algebra shared by the numeric modules."""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.sparse import linalg as spla

from app.config import settings
from app.errors import NonHermitianError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralReport:
    """Eigen-data of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues sorted in descending order.
        rank: Number of eigenvalues whose modulus exceeds tol times the largest.
        operator_norm: Largest eigenvalue modulus.
    """
    eigenvalues: np.ndarray
    rank: int
    operator_norm: float


@dataclass(frozen=True)
class BoundCheck:
    """An inequality ``lhs <= bound`` evaluated numerically."""
    lhs: float
    bound: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound + self.tolerance

    @property
    def slack(self) -> float:
        return self.bound - self.lhs


def as_matrix(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Kronecker product, (kron(A,B))[i*rB+k, j*cB+l] = A[i,j]*B[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def operator_norm(a) -> float:
    """Largest singular value.

    Small matrices go straight to a dense SVD. Larger ones try ARPACK first and
    fall back to the dense decomposition when it does not converge.
    """
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    if not np.any(a):
        return 0.0
    if min(a.shape) > settings.dense_norm_max_dim:
        try:
            s = spla.svds(a, k=1, return_singular_vectors=False, tol=0)
            return float(s[0])
        except spla.ArpackNoConvergence:
            logger.warning(f"ARPACK did not converge on a {a.shape} matrix, using dense SVD")
    return float(linalg.svdvals(a)[0])


def hermitian_residual(a) -> float:
    a = as_matrix(a)
    return operator_norm(a - adjoint(a))


def hermitian_eig(a, tol: float | None = None) -> SpectralReport:
    """Eigen-decompose a Hermitian matrix.

    Args:
        a: Square matrix.
        tol: Relative tolerance used both for the Hermitian test and the rank.

    Returns:
        SpectralReport with eigenvalues sorted descending.

    Raises:
        NonHermitianError: If ``||A - A*||`` exceeds ``tol * max(1, ||A||)``.
    """
    tol = settings.tolerance if tol is None else tol
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"matrix of shape {a.shape} is not square")
    scale = max(1.0, operator_norm(a))
    residual = hermitian_residual(a)
    if residual > tol * scale:
        raise NonHermitianError(f"matrix is not Hermitian: ||A - A*|| = {residual:.3e}")
    if a.shape[0] == 0:
        return SpectralReport(np.zeros(0), 0, 0.0)
    values = linalg.eigvalsh((a + adjoint(a)) / 2)[::-1]
    top = float(np.max(np.abs(values)))
    r = int(np.sum(np.abs(values) > tol * top)) if top > 0 else 0
    return SpectralReport(values, r, top)


def rank(a, tol: float | None = None) -> int:
    """Count singular values greater than tol times the largest one."""
    tol = settings.tolerance if tol is None else tol
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = linalg.svdvals(a)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def psd_residual(a) -> float:
    """max(0, -min eigenvalue) of the Hermitian part of A."""
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    lowest = float(linalg.eigvalsh((a + adjoint(a)) / 2)[0])
    return max(0.0, -lowest)


def unitary_residual(u) -> float:
    u = as_matrix(u)
    return operator_norm(adjoint(u) @ u - identity(u.shape[0]))


def power_kron(a, n: int) -> np.ndarray:
    """n-fold Kronecker power; the 0-th power is the 1x1 identity."""
    out = identity(1)
    for _ in range(n):
        out = kron(out, a)
    return out
