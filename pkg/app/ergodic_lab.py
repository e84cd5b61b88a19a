"""Shift action on words, Cesaro averages and the norm bounds behind them."""
import io
import logging
from dataclasses import dataclass
from math import sqrt
from typing import Callable, Iterable, NamedTuple, Sequence, Union

import numpy as np
import pandas as pd

from app.config import settings
from app.errors import NilpotenceError, PreconditionError, WindowOverflowError
from app.fock_engine import DeformedFock, FockModel, FockOperator
from app.linalg_core import BoundCheck, operator_norm
from app.monotone_symbolic import Pi, ZERO, reduce
from app.words import ObservableWord, shift_word

logger = logging.getLogger(__name__)

# A word, or a linear combination of words given as (coefficient, word) pairs.
Observable = Union[ObservableWord, Sequence[tuple[complex, ObservableWord]]]


class CurvePoint(NamedTuple):
    n: int
    distance: float
    bound: float | None = None


@dataclass(frozen=True)
class MixingCurve:
    """Distances of Cesaro means from a target, sorted by n."""
    entries: tuple[CurvePoint, ...]

    def __post_init__(self):
        ns = [e.n for e in self.entries]
        if ns != sorted(ns):
            raise ValueError("curve entries must be sorted by n")
        if any(e.distance < 0 for e in self.entries):
            raise ValueError("distances must be nonnegative")

    @property
    def distances(self) -> list[float]:
        return [e.distance for e in self.entries]

    def within_bounds(self, tol: float | None = None) -> bool:
        tol = settings.tolerance if tol is None else tol
        return all(e.bound is None or e.distance <= e.bound + tol for e in self.entries)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "n": [e.n for e in self.entries],
                "distance": [e.distance for e in self.entries],
                "bound": [np.nan if e.bound is None else e.bound for e in self.entries],
            }
        )

    def to_csv(self, seed: int | None = None) -> str:
        """CSV text with header n,distance,bound; a missing bound is an empty cell."""
        buffer = io.StringIO()
        if seed is not None:
            buffer.write(f"# seed={seed}\n")
        self.to_frame().to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
        return buffer.getvalue()


def _terms(observable: Observable) -> list[tuple[complex, ObservableWord]]:
    if isinstance(observable, ObservableWord):
        return [(1.0, observable)]
    return [(coeff, word) for coeff, word in observable]


def observable_support(observable: Observable) -> tuple[int, int] | None:
    supports = [w.support for _, w in _terms(observable) if w.support is not None]
    if not supports:
        return None
    return min(s[0] for s in supports), max(s[1] for s in supports)


def required_window(observable: Observable, max_shift: int, min_shift: int = 0) -> tuple[int, int] | None:
    """Smallest window holding every shift of the observable in [min_shift, max_shift]."""
    support = observable_support(observable)
    if support is None:
        return None
    return support[0] + min_shift, support[1] + max_shift


def _check_fits(model: FockModel, observable: Observable, max_shift: int, min_shift: int = 0) -> None:
    need = required_window(observable, max_shift, min_shift)
    if need is not None and not model.window.covers(*need):
        w = model.window
        raise WindowOverflowError(
            f"shifts {min_shift}..{max_shift} do not fit window {w}",
            (min(need[0], w.lo), max(need[1], w.hi)),
        )


def materialize(model: FockModel, observable: Observable) -> FockOperator:
    """Matrix of a word (or combination of words) on the model."""
    total = model.zero()
    for coeff, word in _terms(observable):
        op = model.identity()
        for letter in word:
            factor = model.creator(letter.mode) if letter.is_creator else model.annihilator(letter.mode)
            op = op @ factor
        total = total + coeff * op
    return total


def shift_observable(observable: Observable, k: int, window=None) -> Observable:
    if isinstance(observable, ObservableWord):
        return shift_word(observable, k, window)
    return [(coeff, shift_word(word, k, window)) for coeff, word in observable]


def _cesaro_sums(model: FockModel, observable: Observable, n_list: Iterable[int]):
    """Yield (n, sum_{k<n} alpha^k(W)) for n in n_list, in increasing order."""
    ns = sorted(set(n_list))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must hold positive integers")
    _check_fits(model, observable, ns[-1] - 1)
    total = np.zeros((model.dim, model.dim), dtype=complex)
    k = 0
    for n in ns:
        while k < n:
            total = total + materialize(model, shift_observable(observable, k)).matrix
            k += 1
        yield n, total


def cesaro_distance(
    model: FockModel,
    observable: Observable,
    target: FockOperator,
    n_list: Iterable[int],
    bound: Callable[[int], float] | None = None,
) -> MixingCurve:
    """Operator-norm distance of (1/n) sum_{k<n} alpha^k(W) from ``target``."""
    entries = []
    for n, total in _cesaro_sums(model, observable, n_list):
        distance = operator_norm(total / n - target.matrix)
        entries.append(CurvePoint(n, distance, None if bound is None else bound(n)))
        logger.debug(f"cesaro n={n}: distance {distance:.6g}")
    return MixingCurve(tuple(entries))


def vector_cesaro_residual(model: FockModel, observable: Observable, target: FockOperator, xi, n: int) -> float:
    """||(Cesaro_n(W) - target) xi||."""
    xi = np.asarray(xi, dtype=complex)
    (_, total), = _cesaro_sums(model, observable, [n])
    return float(np.linalg.norm((total / n - target.matrix) @ xi))


def is_wick_ordered(word: ObservableWord) -> bool:
    """True when the word starts with a creator or ends with an annihilator."""
    if word.is_identity:
        return False
    return word.letters[0].is_creator or not word.letters[-1].is_creator


def decay_bound(model: FockModel, word: ObservableWord) -> Callable[[int], float]:
    """n -> sqrt(n M_T^r) / n for a Wick-ordered word with r letters."""
    r = len(word)
    return lambda n: sqrt(n * model.m_t_estimate ** r) / n


def observable_decay_bound(model: FockModel, observable: Observable) -> Callable[[int], float] | None:
    """Sum of per-term decay bounds, or None when some term is not Wick ordered."""
    terms = _terms(observable)
    if not terms or not all(is_wick_ordered(w) for _, w in terms):
        return None
    parts = [(abs(complex(c)), decay_bound(model, w)) for c, w in terms]
    return lambda n: sum(weight * f(n) for weight, f in parts)


def sum_bound_check(model: FockModel, word: ObservableWord, shifts: Sequence[int]) -> BoundCheck:
    """||sum_h alpha^{k_h}(W)|| <= sqrt(n M_T^r) for distinct shifts k_h."""
    if not is_wick_ordered(word):
        raise PreconditionError(f"{word} must start with a creator or end with an annihilator")
    shifts = list(shifts)
    if len(set(shifts)) != len(shifts) or not shifts:
        raise PreconditionError("shifts must be distinct and nonempty")
    _check_fits(model, word, max(shifts), min(shifts))
    total = sum(materialize(model, word.shift(k)).matrix for k in shifts)
    bound = sqrt(len(shifts) * model.m_t_estimate ** len(word))
    return BoundCheck(operator_norm(total), bound, 1e-9)


def lemma_sum1_check(fock: DeformedFock, fs: Sequence, xis: Sequence, level: int) -> BoundCheck:
    """||sum_i a+(f_i) xi_i||_T <= sqrt(n M_T) max ||xi_i||_T for orthonormal f_i.

    ``xis`` are quotient coordinates on ``level``.
    """
    fs = np.asarray(fs, dtype=complex)
    if len(fs) != len(xis) or not len(fs):
        raise PreconditionError("need as many vectors xi as one-particle vectors f")
    gram = fs.conj() @ fs.T
    if np.max(np.abs(gram - np.eye(len(fs)))) > settings.tolerance:
        raise PreconditionError("one-particle family is not orthonormal")
    if not 0 <= level < fock.n_max:
        raise PreconditionError(f"level {level} has no creator block below n_max={fock.n_max}")
    total = np.zeros(fock.level_dims[level + 1], dtype=complex)
    for f, xi in zip(fs, xis):
        total = total + fock.creator_block(f, level) @ np.asarray(xi, dtype=complex)
    largest = max(float(np.linalg.norm(xi)) for xi in xis)
    bound = sqrt(len(fs) * fock.m_t_estimate) * largest
    return BoundCheck(float(np.linalg.norm(total)), bound, settings.tolerance)


class NilpotenceWitness(NamedTuple):
    k: int
    side: str  # "left": alpha^k(W) W = 0, "right": W alpha^k(W) = 0


def nilpotence_witness(word: ObservableWord) -> NilpotenceWitness:
    """Least k <= width+2 making alpha^k(W) W or W alpha^k(W) vanish in the monotone algebra.

    Raises:
        NilpotenceError: For the identity, pure pivot words a_p a+_p and any
            other word without a witness below the cap.
    """
    if word.is_identity:
        raise NilpotenceError("the identity is not nilpotent")
    reduced = reduce(word)
    if reduced is ZERO:
        return NilpotenceWitness(1, "left")
    if isinstance(reduced, Pi) and not reduced.creators and not reduced.annihilators:
        raise NilpotenceError(f"{word} reduces to a pure pivot, which is idempotent")
    cap = word.width + 2
    for k in range(1, cap + 1):
        moved = word.shift(k)
        if reduce(moved + word) is ZERO:
            return NilpotenceWitness(k, "left")
        if reduce(word + moved) is ZERO:
            return NilpotenceWitness(k, "right")
    raise NilpotenceError(f"no nilpotence shift for {word} up to {cap}")


def compression(model: FockModel, level: int) -> FockOperator:
    """E^level, the projection onto one particle level."""
    return model.level_projection(level)


def compressed_mixing(
    model: FockModel,
    m: int,
    observable: Observable,
    n_level: int,
    n_list: Iterable[int],
) -> MixingCurve:
    """Cesaro distance of E^m alpha^k(W) E^n from its fixed-point component.

    The fixed-point component is c E^m when m = n, c the sum of the identity
    coefficients, else 0.
    The bound column is C_X / sqrt(n) with C_X = max(1, max ||R^(l)||)^{r/2},
    l ranging over the levels the word passes through.
    """
    terms = _terms(observable)
    if any(not w.is_identity and not is_wick_ordered(w) for _, w in terms):
        raise PreconditionError("compressed words must start with a creator or end with an annihilator")
    left, right = compression(model, m), compression(model, n_level)
    scalar = sum(complex(c) for c, w in terms if w.is_identity)
    target = left * scalar if m == n_level else model.zero()
    r = max(len(w) for _, w in terms)
    top = min(model.n_max, max(m, n_level) + r)
    r_norms = getattr(model, "r_tower", None)
    if r_norms is not None:
        grow = max([1.0] + [operator_norm(r_norms[lv]) for lv in range(1, top + 1)])
    else:
        grow = max(1.0, model.m_t_estimate)
    weight = sum(abs(complex(c)) for c, w in terms if not w.is_identity)
    c_x = weight * grow ** (r / 2)
    entries = []
    for n, total in _cesaro_sums(model, observable, n_list):
        block = left.matrix @ (total / n) @ right.matrix
        distance = operator_norm(block - target.matrix)
        entries.append(CurvePoint(n, distance, c_x / sqrt(n)))
    return MixingCurve(tuple(entries))
