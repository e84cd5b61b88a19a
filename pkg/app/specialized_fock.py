"""Explicit-basis Fock models for the monotone and Boolean kinds.

The monotone model has basis e_(i1<...<in); the Boolean model is C + H with
e_# at index 0. Both are cheap compared with the Gram construction and are
tied to it by ``intertwining_residual``.
"""
import logging
from functools import lru_cache
from itertools import combinations

import numpy as np

from app.config import settings
from app.fock_engine import DeformedFock, FockModelBase, FockOperator, build_fock
from app.linalg_core import adjoint, identity, operator_norm
from app.yb_catalog import Kind, ModeWindow, build_standard

logger = logging.getLogger(__name__)


class MonotoneFockModel(FockModelBase):
    """Monotone Fock space truncated at n_max particles.

    a+_i e_(i1,...) = e_(i,i1,...) when i < i1 (or the sequence is empty),
    otherwise 0. The annihilator is the transpose.
    """
    m_t_estimate = 1.0

    def __init__(self, window: ModeWindow, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self.window = window
        self.basis: tuple[tuple[int, ...], ...] = tuple(
            u for n in range(n_max + 1) for u in combinations(window.modes, n)
        )
        self.index = {u: x for x, u in enumerate(self.basis)}
        self.level_dims = tuple(
            sum(1 for u in self.basis if len(u) == n) for n in range(n_max + 1)
        )
        logger.debug(f"monotone model on {window}: levels {self.level_dims}")
        self._build_creators()

    def _build_creator(self, mode: int) -> FockOperator:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for col, u in enumerate(self.basis):
            if len(u) < self.n_max and (not u or mode < u[0]):
                m[self.index[(mode,) + u], col] = 1.0
        return self.operator(m)

    def sequence_vector(self, modes) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[tuple(modes)]] = 1.0
        return v


class BooleanFockModel(FockModelBase):
    """Boolean Fock space C + H, basis e_# then e_lo..e_hi."""
    m_t_estimate = 1.0

    def __init__(self, window: ModeWindow):
        self.window = window
        self.level_dims = (1, window.d)
        self._build_creators()

    def _build_creator(self, mode: int) -> FockOperator:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        m[1 + self.window.index(mode), 0] = 1.0
        return self.operator(m)


@lru_cache(maxsize=32)
def specialized_monotone_fock(window: ModeWindow, n_max: int) -> MonotoneFockModel:
    return MonotoneFockModel(window, n_max)


@lru_cache(maxsize=32)
def specialized_boolean_fock(window: ModeWindow) -> BooleanFockModel:
    return BooleanFockModel(window)


def canonical_map(model, fock: DeformedFock) -> np.ndarray:
    """Columns: e_(i1<...<in) (or e_#, e_i) mapped to the Gram class of e_i1 (x) ... (x) e_in."""
    if isinstance(model, BooleanFockModel):
        words = [()] + [(m,) for m in model.window.modes]
    else:
        words = list(model.basis)
    phi = np.zeros((fock.dim, model.dim), dtype=complex)
    for col, u in enumerate(words):
        if len(u) <= fock.n_max:
            phi[:, col] = fock.class_of(u)
    return phi


def intertwining_residual(model, fock: DeformedFock | None = None) -> float:
    """Largest mismatch between the explicit model and the Gram construction.

    Checks that the canonical map is an isometry onto the Gram space and that
    it carries every explicit creator and annihilator to the generic one.
    """
    if fock is None:
        kind = Kind.BOOLEAN if isinstance(model, BooleanFockModel) else Kind.MONOTONE
        fock = build_fock(build_standard(kind, model.window), model.n_max)
    phi = canonical_map(model, fock)
    worst = operator_norm(adjoint(phi) @ phi - identity(model.dim))
    worst = max(worst, operator_norm(phi @ adjoint(phi) - identity(fock.dim)))
    for mode in model.window.modes:
        for explicit, generic in (
            (model.creator(mode), fock.creator(mode)),
            (model.annihilator(mode), fock.annihilator(mode)),
        ):
            worst = max(worst, operator_norm(phi @ explicit.matrix - generic.matrix @ phi))
    if worst > settings.tolerance:
        logger.warning(f"explicit and Gram models disagree by {worst:.3e}")
    return worst


def number_sum_residual(model: FockModelBase) -> float:
    """|| sum_k a+_k a_k - (I - P_Omega) || on an explicit model."""
    total = sum((model.creator(k) @ model.annihilator(k)).matrix for k in model.window.modes)
    target = identity(model.dim) - model.vacuum_projection().matrix
    return operator_norm(total - target)
