"""Catalog of Yang-Baxter-Hecke operators on a finite mode window.

An operator T acts on H (x) H where H has basis e_lo..e_hi. Matrix rows and
columns are indexed lexicographically: e_i (x) e_j sits at (i-lo)*d + (j-lo).
The coefficient of e_k (x) e_l in T(e_i (x) e_j) is ``matrix[(k,l), (i,j)]``.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping

import numpy as np

from app.config import settings
from app.errors import PreconditionError, UnknownKindError
from app.linalg_core import (
    adjoint,
    identity,
    kron,
    operator_norm,
    psd_residual,
    unitary_residual,
)

logger = logging.getLogger(__name__)


class Kind(str, Enum):
    FREE = "free"
    BOSE = "bose"
    FERMI = "fermi"
    BOOLEAN = "boolean"
    MONOTONE = "monotone"
    ANTIMONOTONE = "antimonotone"

    @classmethod
    def parse(cls, value: "str | Kind") -> "Kind":
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise UnknownKindError(f"unknown kind {value!r}; expected one of: {names}") from None


HECKE_Q = {
    Kind.FREE: 0,
    Kind.MONOTONE: 0,
    Kind.ANTIMONOTONE: 0,
    Kind.BOOLEAN: 0,
    Kind.BOSE: 1,
    Kind.FERMI: 1,
}

_REFLECTED = {Kind.MONOTONE: Kind.ANTIMONOTONE, Kind.ANTIMONOTONE: Kind.MONOTONE}


@dataclass(frozen=True)
class ModeWindow:
    """Contiguous block of integer modes lo..hi."""
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty mode window {self.lo}..{self.hi}")

    @classmethod
    def parse(cls, text: str) -> "ModeWindow":
        """Read ``LO..HI`` (e.g. ``-1..4``)."""
        lo, sep, hi = text.strip().partition("..")
        if not sep:
            raise ValueError(f"window must look like LO..HI, got {text!r}")
        return cls(int(lo), int(hi))

    @property
    def d(self) -> int:
        return self.hi - self.lo + 1

    @property
    def modes(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def is_symmetric(self) -> bool:
        return self.lo == -self.hi

    def __contains__(self, mode: int) -> bool:
        return self.lo <= mode <= self.hi

    def index(self, mode: int) -> int:
        if mode not in self:
            raise ValueError(f"mode {mode} outside window {self}")
        return mode - self.lo

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def basis_vector(self, mode: int) -> np.ndarray:
        v = np.zeros(self.d, dtype=complex)
        v[self.index(mode)] = 1.0
        return v

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


@dataclass(frozen=True, eq=False)
class YangBaxterOp:
    """Selfadjoint T >= -I on H (x) H satisfying the braid and Hecke relations."""
    window: ModeWindow
    matrix: np.ndarray
    hecke_q: float
    kind: Kind

    def __post_init__(self):
        d2 = self.window.d ** 2
        if self.matrix.shape != (d2, d2):
            raise ValueError(f"operator matrix must be {d2}x{d2}, got {self.matrix.shape}")
        if self.hecke_q < -1:
            raise ValueError(f"Hecke parameter must be >= -1, got {self.hecke_q}")

    @property
    def d(self) -> int:
        return self.window.d

    def coefficient(self, i: int, j: int, k: int, l: int) -> complex:
        """t_{ij}^{kl}: coefficient of e_k (x) e_l in T(e_i (x) e_j)."""
        w = self.window
        d = self.d
        return complex(self.matrix[w.index(k) * d + w.index(l), w.index(i) * d + w.index(j)])

    def tensor(self) -> np.ndarray:
        """Four-index view t[k, l, i, j] over window positions."""
        d = self.d
        return self.matrix.reshape(d, d, d, d)

    def leg(self, k: int, n: int) -> np.ndarray:
        """T_k on H^{(x)n}: T acting on legs k, k+1 (1-based)."""
        if not 1 <= k < n:
            raise ValueError(f"leg {k} invalid for {n} tensor factors")
        d = self.d
        return kron(kron(identity(d ** (k - 1)), self.matrix), identity(d ** (n - k - 1)))

    def norm(self) -> float:
        return operator_norm(self.matrix)


def _flip(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def build_standard(kind: "str | Kind", window: ModeWindow) -> YangBaxterOp:
    """Build one of the six cataloged operators on ``window``."""
    kind = Kind.parse(kind)
    d = window.d
    if kind is Kind.FREE:
        m = np.zeros((d * d, d * d), dtype=complex)
    elif kind is Kind.BOSE:
        m = _flip(d)
    elif kind is Kind.FERMI:
        m = -_flip(d)
    elif kind is Kind.BOOLEAN:
        m = -identity(d * d)
    else:
        # window positions are order preserving, so comparisons on positions
        # are comparisons on modes
        i, j = np.divmod(np.arange(d * d), d)
        keep = i >= j if kind is Kind.MONOTONE else i <= j
        m = np.diag(np.where(keep, -1.0, 0.0)).astype(complex)
    logger.debug(f"built {kind.value} operator on window {window}")
    return YangBaxterOp(window, m, HECKE_Q[kind], kind)


def verify_selfadjoint(t: YangBaxterOp) -> float:
    return operator_norm(t.matrix - adjoint(t.matrix))


def verify_braid(t: YangBaxterOp) -> float:
    """||T1 T2 T1 - T2 T1 T2|| on H^{(x)3}."""
    t1, t2 = t.leg(1, 3), t.leg(2, 3)
    return operator_norm(t1 @ t2 @ t1 - t2 @ t1 @ t2)


def verify_hecke(t: YangBaxterOp, q: float | None = None) -> float:
    """||T^2 - (q-1)T - qI||; q defaults to the operator's own parameter."""
    q = t.hecke_q if q is None else q
    m = t.matrix
    return operator_norm(m @ m - (q - 1) * m - q * identity(m.shape[0]))


def verify_bounded_below(t: YangBaxterOp) -> float:
    return psd_residual(t.matrix + identity(t.matrix.shape[0]))


def commutant_residual(t: YangBaxterOp, u: np.ndarray, tol: float | None = None) -> float:
    """||T(U(x)U) - (U(x)U)T|| for a unitary U on the window."""
    tol = settings.tolerance if tol is None else tol
    u = np.asarray(u, dtype=complex)
    if u.shape != (t.d, t.d):
        raise PreconditionError(f"unitary must be {t.d}x{t.d}, got {u.shape}")
    if unitary_residual(u) > tol:
        raise PreconditionError("matrix passed as U is not unitary")
    uu = kron(u, u)
    return operator_norm(t.matrix @ uu - uu @ t.matrix)


def translation_covariance_residual(t: YangBaxterOp) -> float:
    """Largest change of a coefficient when all four indices move up by one."""
    if t.d < 2:
        raise PreconditionError("translation covariance needs at least two modes")
    c = t.tensor()
    return float(np.max(np.abs(c[1:, 1:, 1:, 1:] - c[:-1, :-1, :-1, :-1])))


def reflection_matrix(window: ModeWindow) -> np.ndarray:
    """R e_j = e_{-j}; on a symmetric window this reverses the positions."""
    if not window.is_symmetric:
        raise PreconditionError(f"reflection needs a window symmetric about 0, got {window}")
    return np.eye(window.d, dtype=complex)[::-1]


def reflection_conjugate(t: YangBaxterOp) -> YangBaxterOp:
    """(R(x)R) T (R(x)R); swaps monotone and anti-monotone."""
    r = reflection_matrix(t.window)
    rr = kron(r, r)
    return YangBaxterOp(t.window, rr @ t.matrix @ rr, t.hecke_q, _REFLECTED.get(t.kind, t.kind))


def permutation_unitary(window: ModeWindow, mapping: Mapping[int, int]) -> np.ndarray:
    """U e_j = e_{g(j)} for a permutation g given on (part of) the window."""
    image = {m: mapping.get(m, m) for m in window.modes}
    if sorted(image.values()) != list(window.modes):
        raise PreconditionError("mapping is not a permutation of the window modes")
    u = np.zeros((window.d, window.d), dtype=complex)
    for src, dst in image.items():
        u[window.index(dst), window.index(src)] = 1.0
    return u


def transposition(window: ModeWindow, a: int, b: int) -> np.ndarray:
    return permutation_unitary(window, {a: b, b: a})


def transpositions(window: ModeWindow) -> Iterator[tuple[tuple[int, int], np.ndarray]]:
    modes = list(window.modes)
    for x, a in enumerate(modes):
        for b in modes[x + 1:]:
            yield (a, b), transposition(window, a, b)
