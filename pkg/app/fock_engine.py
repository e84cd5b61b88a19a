"""Deformed Fock spaces built from a Yang-Baxter-Hecke operator.

Level n of the truncated space is the quotient of H^{(x)n} by the kernel of
P^(n). Coordinates on the quotient come from the Gram factor C_n, so the
deformed inner product is the standard one on coordinates and the deformed
adjoint is the plain conjugate transpose.
"""
import logging
from dataclasses import dataclass
from itertools import permutations
from math import comb, prod, sqrt
from types import MappingProxyType
from typing import Mapping, NamedTuple, Protocol, Sequence, runtime_checkable

import numpy as np
from scipy import linalg

from app.config import settings
from app.errors import KernelViolationError, PreconditionError, SizeCapError
from app.linalg_core import (
    BoundCheck,
    adjoint,
    identity,
    kron,
    operator_norm,
    power_kron,
    psd_residual,
)
from app.yb_catalog import Kind, ModeWindow, YangBaxterOp, commutant_residual

logger = logging.getLogger(__name__)


def hecke_factorial(q, n: int):
    """n-th Hecke factorial prod_{k=1..n} (1 + q + ... + q^{k-1}).

    The arithmetic follows the type of ``q``, so integer or Fraction input
    gives an exact result.
    """
    if q < -1:
        raise ValueError(f"Hecke parameter must be >= -1, got {q}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return prod((sum(q ** j for j in range(k)) for k in range(1, n + 1)), start=1)


def _check_cap(d: int, n: int) -> None:
    dim = d ** n
    if dim > settings.max_tensor_dim:
        raise SizeCapError(dim, settings.max_tensor_dim)


def _first_leg(t: YangBaxterOp, n: int) -> np.ndarray:
    return kron(t.matrix, identity(t.d ** (n - 2)))


def build_R(t: YangBaxterOp, n: int) -> np.ndarray:
    """R^(n) = I + T_1 (I (x) R^(n-1)), with R^(1) = I."""
    if n < 1:
        raise ValueError("R^(n) needs n >= 1")
    _check_cap(t.d, n)
    r = identity(t.d)
    for m in range(2, n + 1):
        r = identity(t.d ** m) + _first_leg(t, m) @ kron(identity(t.d), r)
    return r


def build_R_sum(t: YangBaxterOp, n: int) -> np.ndarray:
    """R^(n) as the explicit sum I + T_1 + T_1T_2 + ... + T_1...T_{n-1}."""
    _check_cap(t.d, n)
    total = identity(t.d ** n)
    term = identity(t.d ** n)
    for k in range(1, n):
        term = term @ t.leg(k, n)
        total = total + term
    return total


def _tower(t: YangBaxterOp, n_max: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """R^(0..n_max) and P^(0..n_max); level 0 entries are the 1x1 identity."""
    _check_cap(t.d, n_max)
    rs = [identity(1)]
    ps = [identity(1)]
    for n in range(1, n_max + 1):
        if n == 1:
            r = identity(t.d)
        else:
            r = identity(t.d ** n) + _first_leg(t, n) @ kron(identity(t.d), rs[-1])
        rs.append(r)
        ps.append(kron(identity(t.d), ps[-1]) @ r)
    return rs, ps


def build_P(t: YangBaxterOp, n: int) -> np.ndarray:
    """P^(n+1) = (I (x) P^(n)) R^(n+1), with P^(1) = I."""
    if n < 1:
        raise ValueError("P^(n) needs n >= 1")
    return _tower(t, n)[1][n]


def p_recursion_residual(t: YangBaxterOp, n: int) -> float:
    """Distance between (I (x) P^(n-1)) R^(n) and R^(n)* (I (x) P^(n-1))."""
    if n < 2:
        return 0.0
    rs, ps = _tower(t, n)
    lifted = kron(identity(t.d), ps[n - 1])
    return operator_norm(lifted @ rs[n] - adjoint(rs[n]) @ lifted)


class PSquareResiduals(NamedTuple):
    idempotency: float
    selfadjoint: float
    positivity: float

    @property
    def worst(self) -> float:
        return max(self)


def check_psquare(t: YangBaxterOp, n: int) -> PSquareResiduals:
    """Residuals of (P^n)^2 = n!_q P^n, P^n = (P^n)*, and P^n >= 0."""
    p = build_P(t, n)
    scale = hecke_factorial(t.hecke_q, n)
    return PSquareResiduals(
        operator_norm(p @ p - scale * p),
        operator_norm(p - adjoint(p)),
        psd_residual(p),
    )


def pnorm_check(t: YangBaxterOp, n: int) -> tuple[float, float]:
    """Return (||P^(n)||, expected value)."""
    p = build_P(t, n)
    norm = operator_norm(p)
    if norm <= settings.kernel_tolerance:
        return norm, 0.0
    return norm, float(hecke_factorial(t.hecke_q, n))


def level_rank_expectation(kind: "str | Kind", d: int, n: int) -> int:
    """Dimension of level n for a cataloged kind on d modes."""
    kind = Kind.parse(kind)
    if kind in (Kind.MONOTONE, Kind.ANTIMONOTONE, Kind.FERMI):
        return comb(d, n)
    if kind is Kind.BOSE:
        return comb(d + n - 1, n)
    if kind is Kind.BOOLEAN:
        return (1, d)[n] if n < 2 else 0
    return d ** n


# sector restriction


@dataclass(frozen=True)
class Sector:
    """All rearrangements of one mode multiset, with T_j restricted to them."""
    words: tuple[tuple[int, ...], ...]
    legs: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.words[0])


def build_sector(t: YangBaxterOp, modes: Sequence[int]) -> Sector:
    """Restrict T_1..T_{n-1} to the span of the rearrangements of ``modes``.

    Raises:
        PreconditionError: If T sends some e_i (x) e_j outside span{e_i (x) e_j, e_j (x) e_i}.
    """
    w = t.window
    modes = tuple(modes)
    for m in modes:
        w.index(m)
    words = tuple(sorted(set(permutations(modes))))
    where = {u: x for x, u in enumerate(words)}
    n = len(modes)
    d = t.d
    legs = []
    for j in range(n - 1):
        leg = np.zeros((len(words), len(words)), dtype=complex)
        for col, u in enumerate(words):
            column = t.matrix[:, w.index(u[j]) * d + w.index(u[j + 1])]
            for pos in np.flatnonzero(column):
                k, l = divmod(int(pos), d)
                v = u[:j] + (k + w.lo, l + w.lo) + u[j + 2:]
                if v not in where:
                    raise PreconditionError(f"{t.kind.value} operator does not preserve mode sectors")
                leg[where[v], col] += column[pos]
        legs.append(leg)
    return Sector(words, tuple(legs))


def _shifted_r(sector: Sector, start: int, m: int) -> np.ndarray:
    """I^{(x)start} (x) R^(m) inside the sector."""
    dim = len(sector.words)
    total = identity(dim)
    term = identity(dim)
    for k in range(m - 1):
        term = term @ sector.legs[start + k]
        total = total + term
    return total


def build_R_sector(t: YangBaxterOp, modes: Sequence[int]) -> np.ndarray:
    sector = build_sector(t, modes)
    return _shifted_r(sector, 0, sector.n)


def build_P_sector(t: YangBaxterOp, modes: Sequence[int]) -> np.ndarray:
    """P^(n) restricted to a sector, as the product of shifted R^(m), m = 2..n."""
    sector = build_sector(t, modes)
    n = sector.n
    p = identity(len(sector.words))
    for m in range(2, n + 1):
        p = p @ _shifted_r(sector, n - m, m)
    return p


# quotient levels


@dataclass(frozen=True, eq=False)
class LevelGram:
    """Gram matrix of level n and its factor C_n with G_n = C_n* C_n."""
    n: int
    gram: np.ndarray
    factor: np.ndarray

    @property
    def rank(self) -> int:
        return self.factor.shape[0]

    def coordinates(self, xi) -> np.ndarray:
        return self.factor @ np.asarray(xi, dtype=complex)


def factorize_gram(n: int, gram: np.ndarray, tol: float | None = None) -> LevelGram:
    """Factor G = C* C keeping eigenvalues above tol times the largest."""
    tol = settings.kernel_tolerance if tol is None else tol
    g = (gram + adjoint(gram)) / 2
    values, vectors = linalg.eigh(g)
    values, vectors = values[::-1], vectors[:, ::-1]
    top = values[0] if values.size else 0.0
    keep = values > tol * top if top > 0 else np.zeros(values.shape, dtype=bool)
    factor = np.sqrt(values[keep])[:, None] * adjoint(vectors[:, keep])
    return LevelGram(n, gram, factor)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense matrix on the truncated Fock space, graded by particle level."""
    matrix: np.ndarray
    level_dims: tuple[int, ...]
    window: ModeWindow | None = None

    def __post_init__(self):
        dim = sum(self.level_dims)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not fit levels {self.level_dims}")

    @property
    def n_max(self) -> int:
        return len(self.level_dims) - 1

    @property
    def dim(self) -> int:
        return sum(self.level_dims)

    def offset(self, level: int) -> int:
        return sum(self.level_dims[:level])

    def block(self, target: int, source: int) -> np.ndarray:
        t0, s0 = self.offset(target), self.offset(source)
        return self.matrix[t0:t0 + self.level_dims[target], s0:s0 + self.level_dims[source]]

    @property
    def blocks(self) -> dict[tuple[int, int], np.ndarray]:
        """Nonzero blocks keyed by (target level, source level)."""
        out = {}
        for t in range(len(self.level_dims)):
            for s in range(len(self.level_dims)):
                b = self.block(t, s)
                if b.size and np.any(b):
                    out[(t, s)] = b
        return out

    def _like(self, matrix: np.ndarray) -> "FockOperator":
        return FockOperator(matrix, self.level_dims, self.window)

    def adjoint(self) -> "FockOperator":
        return self._like(adjoint(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return self._like(self.matrix @ other.matrix)
        return self.matrix @ np.asarray(other, dtype=complex)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return self._like(self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self._like(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "FockOperator":
        return self._like(complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def norm(self) -> float:
        return operator_norm(self.matrix)


@runtime_checkable
class FockModel(Protocol):
    """What ergodic experiments need from a truncated Fock space."""
    window: ModeWindow
    n_max: int
    level_dims: tuple[int, ...]
    m_t_estimate: float

    def creator(self, mode: int) -> FockOperator: ...

    def annihilator(self, mode: int) -> FockOperator: ...

    def identity(self) -> FockOperator: ...

    def vacuum(self) -> np.ndarray: ...

    def vacuum_projection(self) -> FockOperator: ...

    def zero(self) -> FockOperator: ...


class FockModelBase:
    """Shared helpers for models with one creator per mode.

    Subclasses call ``_build_creators`` at the end of ``__init__``; the creators
    are read-only afterwards, so instances can be shared between threads.
    """
    window: ModeWindow
    level_dims: tuple[int, ...]
    _creators: Mapping[int, FockOperator] = MappingProxyType({})

    @property
    def n_max(self) -> int:
        return len(self.level_dims) - 1

    @property
    def dim(self) -> int:
        return sum(self.level_dims)

    def _build_creator(self, mode: int) -> FockOperator:
        raise NotImplementedError

    def _build_creators(self) -> None:
        self._creators = MappingProxyType({m: self._build_creator(m) for m in self.window.modes})

    def creator(self, mode: int) -> FockOperator:
        self.window.index(mode)
        return self._creators[mode]

    def annihilator(self, mode: int) -> FockOperator:
        return self.creator(mode).adjoint()

    def operator(self, matrix: np.ndarray) -> FockOperator:
        return FockOperator(np.asarray(matrix, dtype=complex), self.level_dims, self.window)

    def identity(self) -> FockOperator:
        return self.operator(identity(self.dim))

    def zero(self) -> FockOperator:
        return self.operator(np.zeros((self.dim, self.dim)))

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def vacuum_projection(self) -> FockOperator:
        p = np.zeros((self.dim, self.dim), dtype=complex)
        p[0, 0] = 1.0
        return self.operator(p)

    def level_projection(self, level: int) -> FockOperator:
        p = np.zeros((self.dim, self.dim), dtype=complex)
        start = sum(self.level_dims[:level])
        idx = np.arange(start, start + self.level_dims[level])
        p[idx, idx] = 1.0
        return self.operator(p)


class DeformedFock(FockModelBase):
    """Truncated T-deformed Fock space on levels 0..n_max.

    Built by ``build_fock``; treat instances as immutable.
    """

    def __init__(self, t: YangBaxterOp, levels: Sequence[LevelGram], r_tower: Sequence[np.ndarray]):
        self.t = t
        self.window = t.window
        self.levels = tuple(levels)
        self.r_tower = tuple(r_tower)
        self.level_dims = tuple(lv.rank for lv in self.levels)
        self.m_t_estimate = max((operator_norm(r) for r in self.r_tower[1:]), default=1.0)
        self._build_creators()

    def tensor_vector(self, modes: Sequence[int]) -> np.ndarray:
        """e_{i1} (x) ... (x) e_{in} on H^{(x)n}."""
        return power_vector([self.window.basis_vector(m) for m in modes])

    def embed(self, level: int, coords) -> np.ndarray:
        """Place level coordinates into a full Fock vector."""
        v = np.zeros(self.dim, dtype=complex)
        start = sum(self.level_dims[:level])
        v[start:start + self.level_dims[level]] = coords
        return v

    def class_of(self, modes: Sequence[int]) -> np.ndarray:
        """Fock vector of the class of e_{i1} (x) ... (x) e_{in}."""
        n = len(modes)
        return self.embed(n, self.levels[n].coordinates(self.tensor_vector(modes)))

    def creator_block(self, f, n: int) -> np.ndarray:
        """Solve A_n C_n = C_{n+1} E_f for the creator block from level n."""
        f = np.asarray(f, dtype=complex)
        if f.shape != (self.window.d,):
            raise ValueError(f"vector must have {self.window.d} entries, got {f.shape}")
        c_n = self.levels[n].factor
        c_up = self.levels[n + 1].factor
        target = c_up @ kron(f[:, None], identity(self.t.d ** n))
        if c_n.shape[0] == 0 or c_up.shape[0] == 0:
            return np.zeros((c_up.shape[0], c_n.shape[0]), dtype=complex)
        solution, *_ = linalg.lstsq(c_n.T, target.T)
        block = solution.T
        scale = max(1.0, operator_norm(target))
        residual = operator_norm(block @ c_n - target)
        if residual > settings.kernel_tolerance * scale:
            raise KernelViolationError(
                f"creator block at level {n} leaves the quotient: residual {residual:.3e}"
            )
        return block

    def _build_creator(self, mode: int) -> FockOperator:
        return creator_matrix(self, self.window.basis_vector(mode))


def power_vector(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


def build_fock(t: YangBaxterOp, n_max: int, window: ModeWindow | None = None) -> DeformedFock:
    """Build the truncated deformed Fock space up to level ``n_max``.

    Args:
        t: Yang-Baxter operator; its window is the one-particle basis.
        n_max: Highest particle level kept.
        window: Optional, must equal ``t.window`` when given.

    Raises:
        SizeCapError: If d**n_max exceeds the configured cap.
    """
    if window is not None and window != t.window:
        raise ValueError(f"window {window} differs from the operator window {t.window}")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    rs, ps = _tower(t, n_max)
    levels = [factorize_gram(n, ps[n]) for n in range(n_max + 1)]
    fock = DeformedFock(t, levels, rs)
    logger.info(f"built {t.kind.value} Fock space on {t.window}, levels {fock.level_dims}")
    return fock


def creator_matrix(fock: DeformedFock, f) -> FockOperator:
    """a+(f) as a FockOperator; the top level is sent to 0."""
    m = np.zeros((fock.dim, fock.dim), dtype=complex)
    offsets = np.cumsum((0,) + fock.level_dims)
    for n in range(fock.n_max):
        m[offsets[n + 1]:offsets[n + 2], offsets[n]:offsets[n + 1]] = fock.creator_block(f, n)
    return fock.operator(m)


def annihilator_matrix(fock: DeformedFock, f) -> FockOperator:
    return creator_matrix(fock, f).adjoint()


def creator_norm_check(fock: DeformedFock, f, n: int) -> BoundCheck:
    """||a+(f) on level n|| <= ||R^(n+1)||^{1/2} ||f||."""
    if not 0 <= n < fock.n_max:
        raise PreconditionError(f"level {n} has no creator block below n_max={fock.n_max}")
    f = np.asarray(f, dtype=complex)
    lhs = operator_norm(fock.creator_block(f, n))
    bound = sqrt(operator_norm(fock.r_tower[n + 1])) * float(np.linalg.norm(f))
    return BoundCheck(lhs, bound, settings.tolerance)


def _wick_sum(fock: DeformedFock, i: int, j: int) -> np.ndarray:
    """Sum over k, l of t_{jl}^{ik} a+_k a_l."""
    w = fock.window
    d = w.d
    total = np.zeros((fock.dim, fock.dim), dtype=complex)
    pi, pj = w.index(i), w.index(j)
    for pk, k in enumerate(w.modes):
        for pl, l in enumerate(w.modes):
            coeff = fock.t.matrix[pi * d + pk, pj * d + pl]
            if coeff != 0:
                total += coeff * (fock.creator(k) @ fock.annihilator(l)).matrix
    return total


def wick_residual(fock: DeformedFock, i: int, j: int) -> float:
    """||a_i a+_j - sum t_{jl}^{ik} a+_k a_l - delta_ij I|| on levels below n_max."""
    lhs = (fock.annihilator(i) @ fock.creator(j)).matrix - _wick_sum(fock, i, j)
    if i == j:
        lhs = lhs - identity(fock.dim)
    end = sum(fock.level_dims[:fock.n_max])
    return operator_norm(lhs[:end, :end])


def wick_sum_bound_check(fock: DeformedFock, i: int, j: int, xi, n: int) -> BoundCheck:
    """||sum t a+_k a_l xi|| <= ||T|| ||R^(n)|| ||xi||_T for xi on level n.

    ``xi`` is given in quotient coordinates of level n.
    """
    xi = np.asarray(xi, dtype=complex)
    if not 1 <= n <= fock.n_max:
        raise PreconditionError(f"level {n} outside 1..{fock.n_max}")
    if xi.shape != (fock.level_dims[n],):
        raise ValueError(f"level {n} coordinates have {fock.level_dims[n]} entries, got {xi.shape}")
    if not np.any(xi):
        raise PreconditionError("vector must be nonzero")
    lhs = float(np.linalg.norm(_wick_sum(fock, i, j) @ fock.embed(n, xi)))
    bound = fock.t.norm() * operator_norm(fock.r_tower[n]) * float(np.linalg.norm(xi))
    return BoundCheck(lhs, bound, settings.tolerance * max(1.0, bound))


def free_annihilator_factorization_check(fock: DeformedFock, f, n: int) -> float:
    """Residual of a(f) C_n = C_{n-1} l(f) R^(n), l(f) the free left annihilator."""
    if not 1 <= n <= fock.n_max:
        raise PreconditionError(f"level {n} outside 1..{fock.n_max}")
    f = np.asarray(f, dtype=complex)
    lower = fock.creator_block(f, n - 1)
    free_left = kron(f.conj()[None, :], identity(fock.t.d ** (n - 1)))
    lhs = adjoint(lower) @ fock.levels[n].factor
    rhs = fock.levels[n - 1].factor @ free_left @ fock.r_tower[n]
    return operator_norm(lhs - rhs)


def second_quantize(fock: DeformedFock, u) -> FockOperator:
    """F(U) = direct sum of U^{(x)n}, in quotient coordinates."""
    u = np.asarray(u, dtype=complex)
    m = np.zeros((fock.dim, fock.dim), dtype=complex)
    start = 0
    for n, level in enumerate(fock.levels):
        r = level.rank
        if r:
            c = level.factor
            solution, *_ = linalg.lstsq(c.T, (c @ power_kron(u, n)).T)
            m[start:start + r, start:start + r] = solution.T
        start += r
    return fock.operator(m)


def bogoliubov_covariance_check(fock: DeformedFock, u, tol: float | None = None) -> float:
    """max_f ||F(U) a(f) F(U)* - a(Uf)||, together with ||F(U) Omega - Omega||.

    Raises:
        PreconditionError: If U does not commute with T at the two-particle level.
    """
    tol = settings.tolerance if tol is None else tol
    u = np.asarray(u, dtype=complex)
    if commutant_residual(fock.t, u, tol) > tol:
        raise PreconditionError("unitary does not commute with T; no Bogoliubov automorphism")
    fu = second_quantize(fock, u)
    worst = float(np.linalg.norm(fu @ fock.vacuum() - fock.vacuum()))
    worst = max(worst, operator_norm(fu.adjoint().matrix @ fu.matrix - identity(fock.dim)))
    for mode in fock.window.modes:
        f = fock.window.basis_vector(mode)
        moved = (fu @ fock.annihilator(mode) @ fu.adjoint()).matrix
        worst = max(worst, operator_norm(moved - annihilator_matrix(fock, u @ f).matrix))
    return worst
