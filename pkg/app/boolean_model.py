"""Boolean Fock space C + H, its operators A + bI and the expectation E.

Operators are stored as a compact part on the basis {e_#, e_lo, ..., e_hi}
(e_# first) plus an explicit scalar b for the bI summand.
"""
import logging
from dataclasses import dataclass
from itertools import permutations
from math import factorial, sqrt
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from app.config import settings
from app.ergodic_lab import CurvePoint, MixingCurve
from app.errors import PreconditionError, WindowOverflowError
from app.linalg_core import adjoint, identity, operator_norm
from app.yb_catalog import ModeWindow

logger = logging.getLogger(__name__)

VACUUM = "#"


@dataclass(frozen=True, eq=False)
class BooleanOp:
    """A + bI on C + H."""
    window: ModeWindow
    compact: np.ndarray
    scalar: complex = 0.0

    def __post_init__(self):
        size = self.window.d + 1
        if self.compact.shape != (size, size):
            raise ValueError(f"compact part must be {size}x{size}, got {self.compact.shape}")

    @property
    def size(self) -> int:
        return self.window.d + 1

    def full(self) -> np.ndarray:
        return self.compact + self.scalar * identity(self.size)

    def _like(self, compact, scalar) -> "BooleanOp":
        return BooleanOp(self.window, np.asarray(compact, dtype=complex), complex(scalar))

    def __add__(self, other: "BooleanOp") -> "BooleanOp":
        return self._like(self.compact + other.compact, self.scalar + other.scalar)

    def __sub__(self, other: "BooleanOp") -> "BooleanOp":
        return self._like(self.compact - other.compact, self.scalar - other.scalar)

    def __mul__(self, value) -> "BooleanOp":
        value = complex(value)
        return self._like(value * self.compact, value * self.scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "BooleanOp") -> "BooleanOp":
        # (A + bI)(A' + b'I) = (AA' + bA' + b'A) + bb'I
        compact = self.compact @ other.compact + self.scalar * other.compact + other.scalar * self.compact
        return self._like(compact, self.scalar * other.scalar)

    def adjoint(self) -> "BooleanOp":
        return self._like(adjoint(self.compact), np.conj(self.scalar))

    def distance(self, other: "BooleanOp") -> float:
        return operator_norm(self.full() - other.full())


def position(window: ModeWindow, label) -> int:
    """Row of e_# (label "#") or of e_i in the Boolean basis."""
    if label == VACUUM:
        return 0
    return 1 + window.index(int(label))


def zero_op(window: ModeWindow) -> BooleanOp:
    return BooleanOp(window, np.zeros((window.d + 1, window.d + 1), dtype=complex))


def scalar_op(window: ModeWindow, b: complex) -> BooleanOp:
    return BooleanOp(window, np.zeros((window.d + 1, window.d + 1), dtype=complex), complex(b))


def rank_one(window: ModeWindow, target, source, coeff: complex = 1.0) -> BooleanOp:
    """coeff |e_target><e_source|; labels are modes or "#"."""
    m = np.zeros((window.d + 1, window.d + 1), dtype=complex)
    m[position(window, target), position(window, source)] = coeff
    return BooleanOp(window, m)


def vacuum_projection(window: ModeWindow) -> BooleanOp:
    return rank_one(window, VACUUM, VACUUM)


def _one_particle(window: ModeWindow, f) -> np.ndarray:
    if isinstance(f, (int, np.integer)):
        return window.basis_vector(int(f))
    f = np.asarray(f, dtype=complex)
    if f.shape != (window.d,):
        raise ValueError(f"vector must have {window.d} entries, got {f.shape}")
    return f


def boolean_create(window: ModeWindow, f) -> BooleanOp:
    """a+(f)(alpha + g) = 0 + alpha f; ``f`` is a vector or a mode."""
    m = np.zeros((window.d + 1, window.d + 1), dtype=complex)
    m[1:, 0] = _one_particle(window, f)
    return BooleanOp(window, m)


def boolean_annihilate(window: ModeWindow, f) -> BooleanOp:
    """a(f)(alpha + g) = <g, f> + 0."""
    return boolean_create(window, f).adjoint()


class BoolRelResiduals(NamedTuple):
    annihilators: float
    creators: float
    mixed: float
    completeness: float

    @property
    def worst(self) -> float:
        return max(self)


def verify_boolrel(window: ModeWindow) -> BoolRelResiduals:
    """Residuals of a(f)a(g) = 0, a+(f)a+(g) = 0, a(f)a+(g) = <g,f> P_# and
    P_# = I - sum_k a+(e_k) a(e_k), over basis vectors f, g."""
    p = vacuum_projection(window).full()
    modes = list(window.modes)
    worst_a = worst_c = worst_m = 0.0
    for i in modes:
        for j in modes:
            ai, aj = boolean_annihilate(window, i).full(), boolean_annihilate(window, j).full()
            ci, cj = boolean_create(window, i).full(), boolean_create(window, j).full()
            worst_a = max(worst_a, operator_norm(ai @ aj))
            worst_c = max(worst_c, operator_norm(ci @ cj))
            worst_m = max(worst_m, operator_norm(ai @ cj - (1.0 if i == j else 0.0) * p))
    number = sum(boolean_create(window, k).full() @ boolean_annihilate(window, k).full() for k in modes)
    completeness = operator_norm(p - (identity(window.d + 1) - number))
    return BoolRelResiduals(worst_a, worst_c, worst_m, completeness)


def _block_unitary(window: ModeWindow, v: np.ndarray) -> np.ndarray:
    u = np.zeros((window.d + 1, window.d + 1), dtype=complex)
    u[0, 0] = 1.0
    u[1:, 1:] = v
    return u


def _conjugate(x: BooleanOp, u: np.ndarray) -> BooleanOp:
    return BooleanOp(x.window, u @ x.compact @ adjoint(u), x.scalar)


def compact_support(x: BooleanOp, tol: float = 0.0) -> tuple[int, int] | None:
    """Smallest and largest mode touched by the compact part."""
    rows = np.flatnonzero(np.any(np.abs(x.compact[1:, :]) > tol, axis=1))
    cols = np.flatnonzero(np.any(np.abs(x.compact[:, 1:]) > tol, axis=0))
    hit = np.union1d(rows, cols)
    if hit.size == 0:
        return None
    return x.window.lo + int(hit[0]), x.window.lo + int(hit[-1])


def shift_op(x: BooleanOp, k: int) -> BooleanOp:
    """Conjugate by P_# + V with V e_i = e_{i+k}; the scalar part is unchanged."""
    w = x.window
    support = compact_support(x)
    if support is not None and not w.covers(support[0] + k, support[1] + k):
        raise WindowOverflowError(
            f"shift by {k} moves modes {support[0]}..{support[1]} out of {w}",
            (min(w.lo, support[0] + k), max(w.hi, support[1] + k)),
        )
    m = np.zeros_like(x.compact)
    rows = np.array([0] + [1 + w.index(i + k) if i + k in w else -1 for i in w.modes])
    keep = rows >= 0
    # rows/columns that would leave the window are zero by the support check
    src = np.flatnonzero(keep)
    m[np.ix_(rows[keep], rows[keep])] = x.compact[np.ix_(src, src)]
    return BooleanOp(w, m, x.scalar)


def permutation_op(x: BooleanOp, g: Mapping[int, int]) -> BooleanOp:
    """Conjugate by P_# + V_g with V_g e_i = e_{g(i)}; unmapped modes stay fixed."""
    w = x.window
    image = {i: g.get(i, i) for i in w.modes}
    if sorted(image.values()) != list(w.modes):
        raise PreconditionError("mapping is not a permutation of the window modes")
    v = np.zeros((w.d, w.d), dtype=complex)
    for src, dst in image.items():
        v[w.index(dst), w.index(src)] = 1.0
    return _conjugate(x, _block_unitary(w, v))


def conditional_expectation(x: BooleanOp) -> BooleanOp:
    """E(A + bI) = <A e_#, e_#> P_# + bI."""
    p = vacuum_projection(x.window)
    return BooleanOp(x.window, x.compact[0, 0] * p.compact, x.scalar)


def fixed_point_membership(x: BooleanOp) -> float:
    """Operator-norm distance from X to span{P_#, P_#^perp}.

    Minimized over both complex coefficients, starting from the trace
    projection (X_##, mean diagonal of the perpendicular block).
    """
    full = x.full()
    size = x.size
    p = np.zeros((size, size), dtype=complex)
    p[0, 0] = 1.0
    q = identity(size) - p

    def distance(params: np.ndarray) -> float:
        c1 = params[0] + 1j * params[1]
        c2 = params[2] + 1j * params[3]
        return operator_norm(full - c1 * p - c2 * q)

    c1 = full[0, 0]
    c2 = np.trace(full[1:, 1:]) / (size - 1)
    start = np.array([c1.real, c1.imag, c2.real, c2.imag])
    best = distance(start)
    if best <= settings.tolerance:
        return best
    result = optimize.minimize(distance, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    return float(min(best, result.fun))


def permutation_fixed_residual(x: BooleanOp, modes: Iterable[int] | None = None) -> float:
    """Largest ||beta_g(X) - X|| over transpositions g of the given modes."""
    modes = list(x.window.modes if modes is None else modes)
    worst = 0.0
    for s, i in enumerate(modes):
        for j in modes[s + 1:]:
            worst = max(worst, permutation_op(x, {i: j, j: i}).distance(x))
    return worst


def mixing_constant(x: BooleanOp) -> float:
    """C_X: l1 mass of the compact part away from the (#,#) entry."""
    mass = np.abs(x.compact).sum() - abs(x.compact[0, 0])
    return float(mass)


def e_mixing_curve(x: BooleanOp, subsequence: Sequence[int], n_list: Iterable[int]) -> MixingCurve:
    """||(1/n) sum_{k<=n} alpha^{l_k}(X) - E(X)|| for n in n_list, with bound C_X/sqrt(n)."""
    ns = sorted(set(n_list))
    subsequence = list(subsequence)
    if not ns or ns[0] < 1:
        raise ValueError("n_list must hold positive integers")
    if len(subsequence) < ns[-1]:
        raise ValueError(f"subsequence has {len(subsequence)} terms, need {ns[-1]}")
    if any(s >= t for s, t in zip(subsequence, subsequence[1:])):
        raise ValueError("subsequence must be strictly increasing")
    target = conditional_expectation(x)
    c_x = mixing_constant(x)
    total = np.zeros_like(x.compact)
    entries = []
    k = 0
    for n in ns:
        while k < n:
            total = total + shift_op(x, subsequence[k]).compact
            k += 1
        distance = operator_norm(total / n - target.compact)
        entries.append(CurvePoint(n, distance, c_x / sqrt(n)))
    return MixingCurve(tuple(entries))


def permutation_average(x: BooleanOp, modes: Iterable[int]) -> BooleanOp:
    """Exact average of beta_g(X) over all permutations g of ``modes``."""
    modes = sorted(set(modes))
    if len(modes) > settings.permutation_cap:
        raise PreconditionError(
            f"{len(modes)} modes exceed the permutation cap {settings.permutation_cap}"
        )
    total = np.zeros_like(x.compact)
    for image in permutations(modes):
        total = total + permutation_op(x, dict(zip(modes, image))).compact
    return BooleanOp(x.window, total / factorial(len(modes)), x.scalar)


def vacuum_state(x: BooleanOp) -> complex:
    """omega_#(X) = <X e_#, e_#>."""
    return complex(x.compact[0, 0] + x.scalar)


def infinity_state(x: BooleanOp) -> complex:
    return complex(x.scalar)


def boolean_invariant_state(gamma: float, x: BooleanOp) -> complex:
    """gamma omega_# + (1 - gamma) omega_infinity."""
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    return gamma * vacuum_state(x) + (1 - gamma) * infinity_state(x)
