"""Exact normal forms for the monotone word algebra.

Every nonzero monotone word equals one of two shapes:

    lambda-form  c(i1)...c(im) a(j1)...a(jn)            i1<...<im, j1>...>jn
    pi-form      c(i1)...c(im) a(k)c(k) a(j1)...a(jn)    additionally im < k > j1

Reduction appends letters on the right following the monotone relations
(a+_i a+_j = a_j a_i = 0 for i >= j, a_j a+_k = 0 for j != k, and the
pivot rules for a_j a+_j). Left products go through the adjoint.
"""
import logging
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np
import sympy

from app.config import settings
from app.errors import PreconditionError, WindowOverflowError
from app.linalg_core import BoundCheck, operator_norm
from app.specialized_fock import specialized_monotone_fock
from app.words import Letter, ObservableWord, a, c
from app.yb_catalog import ModeWindow

logger = logging.getLogger(__name__)


def _increasing(xs: tuple[int, ...]) -> bool:
    return all(x < y for x, y in zip(xs, xs[1:]))


def _decreasing(xs: tuple[int, ...]) -> bool:
    return all(x > y for x, y in zip(xs, xs[1:]))


@dataclass(frozen=True)
class ZeroForm:
    def word(self) -> ObservableWord:
        raise ValueError("the zero form has no word")

    def adjoint(self) -> "ZeroForm":
        return self

    def shift(self, k: int) -> "ZeroForm":
        return self

    @property
    def indices(self) -> tuple[int, ...]:
        return ()

    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Lambda:
    creators: tuple[int, ...] = ()
    annihilators: tuple[int, ...] = ()

    def __post_init__(self):
        if not _increasing(self.creators):
            raise ValueError(f"lambda-form creators must increase: {self.creators}")
        if not _decreasing(self.annihilators):
            raise ValueError(f"lambda-form annihilators must decrease: {self.annihilators}")

    @property
    def is_identity(self) -> bool:
        return not self.creators and not self.annihilators

    def __len__(self) -> int:
        return len(self.creators) + len(self.annihilators)

    @property
    def indices(self) -> tuple[int, ...]:
        return self.creators + self.annihilators

    def word(self) -> ObservableWord:
        return ObservableWord(tuple(c(i) for i in self.creators) + tuple(a(j) for j in self.annihilators))

    def adjoint(self) -> "Lambda":
        return Lambda(self.annihilators[::-1], self.creators[::-1])

    def shift(self, k: int) -> "Lambda":
        return Lambda(tuple(i + k for i in self.creators), tuple(j + k for j in self.annihilators))

    def __str__(self) -> str:
        if self.is_identity:
            return "1"
        parts = ["".join(f"c({i})" for i in self.creators), "".join(f"a({j})" for j in self.annihilators)]
        return " ".join(p for p in parts if p)


@dataclass(frozen=True)
class Pi:
    creators: tuple[int, ...]
    pivot: int
    annihilators: tuple[int, ...]

    def __post_init__(self):
        if not _increasing(self.creators):
            raise ValueError(f"pi-form creators must increase: {self.creators}")
        if not _decreasing(self.annihilators):
            raise ValueError(f"pi-form annihilators must decrease: {self.annihilators}")
        if self.creators and self.creators[-1] >= self.pivot:
            raise ValueError(f"pivot {self.pivot} must exceed the last creator {self.creators[-1]}")
        if self.annihilators and self.annihilators[0] >= self.pivot:
            raise ValueError(f"pivot {self.pivot} must exceed the first annihilator {self.annihilators[0]}")

    @property
    def is_pure(self) -> bool:
        return not self.creators and not self.annihilators

    def __len__(self) -> int:
        return len(self.creators) + 2 + len(self.annihilators)

    @property
    def indices(self) -> tuple[int, ...]:
        return self.creators + (self.pivot,) + self.annihilators

    def word(self) -> ObservableWord:
        return ObservableWord(
            tuple(c(i) for i in self.creators)
            + (a(self.pivot), c(self.pivot))
            + tuple(a(j) for j in self.annihilators)
        )

    def adjoint(self) -> "Pi":
        return Pi(self.annihilators[::-1], self.pivot, self.creators[::-1])

    def shift(self, k: int) -> "Pi":
        return Pi(
            tuple(i + k for i in self.creators),
            self.pivot + k,
            tuple(j + k for j in self.annihilators),
        )

    def __str__(self) -> str:
        parts = [
            "".join(f"c({i})" for i in self.creators),
            f"a({self.pivot})c({self.pivot})",
            "".join(f"a({j})" for j in self.annihilators),
        ]
        return " ".join(p for p in parts if p)


NormalForm = Union[ZeroForm, Lambda, Pi]

ZERO = ZeroForm()
IDENTITY = Lambda()


def delta_below(j: int, k: int) -> int:
    """1 if j < k, else 0."""
    return 1 if j < k else 0


def append_letter(form: NormalForm, letter: Letter) -> NormalForm:
    """Normal form of ``form`` times one more letter on the right."""
    if form is ZERO or isinstance(form, ZeroForm):
        return ZERO
    x = letter.mode
    if isinstance(form, Lambda):
        cre, ann = form.creators, form.annihilators
        if not letter.is_creator:
            if ann and x >= ann[-1]:
                return ZERO
            return Lambda(cre, ann + (x,))
        if ann:
            if x != ann[-1]:
                return ZERO
            if len(ann) >= 2:
                # a_j a_x a+_x = a_j when x < j
                return Lambda(cre, ann[:-1])
            if not cre or cre[-1] < x:
                return Pi(cre, x, ())
            # a+_k a_x a+_x = a+_k when x <= k
            return Lambda(cre, ())
        if cre and cre[-1] >= x:
            return ZERO
        return Lambda(cre + (x,), ())
    cre, p, ann = form.creators, form.pivot, form.annihilators
    if not letter.is_creator:
        if ann:
            if x >= ann[-1]:
                return ZERO
            return Pi(cre, p, ann + (x,))
        if p <= x:
            # a_p a+_p a_x = a_x when p <= x
            return Lambda(cre, (x,))
        return Pi(cre, p, (x,))
    if ann:
        if x != ann[-1]:
            return ZERO
        return Pi(cre, p, ann[:-1])
    if delta_below(p, x):
        return Lambda(cre + (x,), ())
    return ZERO


def prepend_letter(letter: Letter, form: NormalForm) -> NormalForm:
    """letter * form, computed as (form* letter*)*."""
    return adjoint(append_letter(adjoint(form), letter.adjoint()))


def adjoint(form: NormalForm) -> NormalForm:
    return form.adjoint()


@lru_cache(maxsize=65536)
def reduce(word: ObservableWord) -> NormalForm:
    """Normal form of a word, reading letters right to left."""
    form: NormalForm = IDENTITY
    for letter in reversed(word.letters):
        form = prepend_letter(letter, form)
        if form is ZERO:
            break
    return form


def multiply(x: NormalForm, y: NormalForm) -> NormalForm:
    if x is ZERO or y is ZERO:
        return ZERO
    for letter in y.word():
        x = append_letter(x, letter)
        if x is ZERO:
            break
    return x


def structural_equal(x: NormalForm, y: NormalForm) -> bool:
    """Same variant and the same index lists (and pivot)."""
    return type(x) is type(y) and x == y


# polynomials


def as_coefficient(value) -> sympy.Expr:
    """Exact sympy number for ints, Fractions and sympy input; floats stay floats."""
    return sympy.sympify(value)


def _is_zero(value: sympy.Expr) -> bool:
    return value == 0 or complex(value) == 0


def _clean(value: sympy.Expr) -> sympy.Expr:
    return sympy.expand(value)


class MonotonePolynomial:
    """Finite linear combination of normal forms with exact coefficients.

    Zero forms and zero coefficients are never stored. Equality of two
    polynomials is structural; use ``polynomial_equal`` for equality as
    operators.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[NormalForm, object] | Iterable[tuple[NormalForm, object]] = ()):
        collected: dict[NormalForm, sympy.Expr] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for form, coeff in items:
            if form is ZERO or isinstance(form, ZeroForm):
                continue
            collected[form] = _clean(collected.get(form, 0) + as_coefficient(coeff))
        self._terms = {f: v for f, v in collected.items() if not _is_zero(v)}

    @classmethod
    def from_form(cls, form: NormalForm, coeff=1) -> "MonotonePolynomial":
        return cls([(form, coeff)])

    @classmethod
    def from_word(cls, word: ObservableWord, coeff=1) -> "MonotonePolynomial":
        return cls([(reduce(word), coeff)])

    @classmethod
    def from_words(cls, terms: Iterable[tuple[object, ObservableWord]]) -> "MonotonePolynomial":
        return cls([(reduce(w), coeff) for coeff, w in terms])

    @classmethod
    def identity(cls, coeff=1) -> "MonotonePolynomial":
        return cls([(IDENTITY, coeff)])

    @property
    def terms(self) -> dict[NormalForm, sympy.Expr]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotonePolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def coefficient(self, form: NormalForm) -> sympy.Expr:
        return self._terms.get(form, sympy.Integer(0))

    def __add__(self, other: "MonotonePolynomial") -> "MonotonePolynomial":
        return MonotonePolynomial(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "MonotonePolynomial":
        return self.scale(-1)

    def __sub__(self, other: "MonotonePolynomial") -> "MonotonePolynomial":
        return self + (-other)

    def scale(self, value) -> "MonotonePolynomial":
        k = as_coefficient(value)
        return MonotonePolynomial([(f, v * k) for f, v in self._terms.items()])

    def __mul__(self, other):
        if not isinstance(other, MonotonePolynomial):
            return self.scale(other)
        out = []
        for fx, vx in self._terms.items():
            for fy, vy in other._terms.items():
                out.append((multiply(fx, fy), vx * vy))
        return MonotonePolynomial(out)

    def __rmul__(self, value):
        return self.scale(value)

    def adjoint(self) -> "MonotonePolynomial":
        return MonotonePolynomial([(f.adjoint(), sympy.conjugate(v)) for f, v in self._terms.items()])

    def shift(self, k: int) -> "MonotonePolynomial":
        return MonotonePolynomial([(f.shift(k), v) for f, v in self._terms.items()])

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted({i for f in self._terms for i in f.indices}))

    @property
    def max_length(self) -> int:
        return max((len(f) for f in self._terms), default=0)

    def __repr__(self) -> str:
        return f"MonotonePolynomial({format_polynomial(self)!r})"


def format_number(value) -> str:
    """Plain decimal text for a real sympy number (no exponent, no fraction)."""
    value = sympy.sympify(value)
    if isinstance(value, sympy.Rational):
        quotient = Decimal(int(value.p)) / Decimal(int(value.q))
    else:
        quotient = Decimal(repr(float(value)))
    text = format(quotient.normalize(), "f")
    return "0" if text in ("-0", "") else text


def format_coefficient(value: sympy.Expr) -> str:
    """Coefficient text in expression syntax: decimal, or (re,im) when complex."""
    re, im = sympy.re(value), sympy.im(value)
    if im == 0:
        return format_number(re)
    return f"({format_number(re)},{format_number(im)})"


def format_polynomial(p: MonotonePolynomial) -> str:
    """Canonical text of a polynomial; "0" when empty."""
    if not p:
        return "0"
    out = []
    for form, coeff in p.items():
        text = str(form)
        negative = sympy.im(coeff) == 0 and sympy.re(coeff) < 0
        magnitude = -coeff if negative else coeff
        if magnitude == 1:
            body = text
        else:
            body = f"{format_coefficient(magnitude)}*{text}"
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def shift_poly(p: MonotonePolynomial, k: int) -> MonotonePolynomial:
    return p.shift(k)


def vacuum_state(p: MonotonePolynomial) -> sympy.Expr:
    """Identity coefficient plus the coefficients of pure pivots a_k a+_k."""
    total = sympy.Integer(0)
    for form, coeff in p.items():
        if form == IDENTITY or (isinstance(form, Pi) and form.is_pure):
            total = total + coeff
    return sympy.expand(total)


def infinity_state(p: MonotonePolynomial) -> sympy.Expr:
    return p.coefficient(IDENTITY)


def invariant_state(gamma, p: MonotonePolynomial) -> sympy.Expr:
    """(1 - gamma) * infinity_state + gamma * vacuum_state."""
    if not 0 <= gamma <= 1:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    g = as_coefficient(gamma)
    return sympy.expand((1 - g) * infinity_state(p) + g * vacuum_state(p))


def simplify(p: MonotonePolynomial) -> MonotonePolynomial:
    """Merge pivot pairs with the relation a_k a+_k + a+_k a_k = a_{k-1} a+_{k-1}.

    A pair c(C) a_k a+_k a(J) and c(C) a+_k a_k a(J) carrying the same
    coefficient is replaced by the reduction of c(C) a_{k-1} a+_{k-1} a(J).
    """
    current = p
    changed = True
    while changed:
        changed = False
        terms = current.terms
        for form, coeff in terms.items():
            if not isinstance(form, Pi):
                continue
            k = form.pivot
            partner = Lambda(form.creators + (k,), (k,) + form.annihilators)
            if terms.get(partner) != coeff:
                continue
            word = ObservableWord(
                tuple(c(i) for i in form.creators)
                + (a(k - 1), c(k - 1))
                + tuple(a(j) for j in form.annihilators)
            )
            rest = [(f, v) for f, v in terms.items() if f != form and f != partner]
            current = MonotonePolynomial(rest + [(reduce(word), coeff)])
            changed = True
            break
    return current


# numeric oracle


def oracle_window(p: MonotonePolynomial, *others: MonotonePolynomial) -> tuple[int, int]:
    """One mode below the smallest index and one above the largest."""
    idx = set(p.indices)
    for q in others:
        idx.update(q.indices)
    if not idx:
        return 0, 0
    return min(idx) - 1, max(idx) + 1


def numeric_matrix(p: MonotonePolynomial, window, n_max: int):
    """Matrix of p on the truncated monotone Fock space over ``window``.

    Raises:
        WindowOverflowError: If p mentions a mode outside the window.
    """
    idx = p.indices
    if idx and not window.covers(idx[0], idx[-1]):
        raise WindowOverflowError(
            f"polynomial indices {idx[0]}..{idx[-1]} outside {window}",
            (min(idx[0], window.lo), max(idx[-1], window.hi)),
        )
    model = specialized_monotone_fock(window, n_max)
    total = model.zero()
    for form, coeff in p.items():
        op = model.identity()
        for letter in form.word():
            op = op @ (model.creator(letter.mode) if letter.is_creator else model.annihilator(letter.mode))
        total = total + complex(coeff) * op
    return total


def word_matrix(word: ObservableWord, window, n_max: int):
    """Matrix of an unreduced word on the truncated monotone Fock space."""
    model = specialized_monotone_fock(window, n_max)
    op = model.identity()
    for letter in word:
        op = op @ (model.creator(letter.mode) if letter.is_creator else model.annihilator(letter.mode))
    return op


def polynomial_equal(p: MonotonePolynomial, q: MonotonePolynomial, tol: float | None = None) -> bool:
    """Equality as operators.

    Simplified structural equality is sufficient; otherwise the numeric oracle
    decides on a window one mode wider than the indices on each side.
    """
    tol = settings.tolerance if tol is None else tol
    ps, qs = simplify(p), simplify(q)
    if ps == qs:
        return True
    lo, hi = oracle_window(p, q)
    window = ModeWindow(lo, hi)
    n_max = min(window.d, max(p.max_length, q.max_length) + 1)
    diff = numeric_matrix(p, window, n_max).matrix - numeric_matrix(q, window, n_max).matrix
    return bool(np.max(np.abs(diff), initial=0.0) <= tol)


def infinity_witness(p: MonotonePolynomial, window) -> complex:
    """<p e_(lo), e_(lo)> on the single-particle vector below every index of p."""
    idx = p.indices
    if idx and not window.lo < idx[0]:
        raise PreconditionError(f"window {window} must start strictly below mode {idx[0]}")
    if idx and idx[-1] > window.hi:
        raise WindowOverflowError(f"index {idx[-1]} above {window}", (window.lo, idx[-1]))
    n_max = min(window.d, p.max_length + 1)
    model = specialized_monotone_fock(window, max(n_max, 1))
    e = model.sequence_vector((window.lo,))
    return complex(np.vdot(e, numeric_matrix(p, window, model.n_max) @ e))


def vacuum_expectation(p: MonotonePolynomial, window, n_max: int) -> complex:
    """<p Omega, Omega> computed numerically."""
    op = numeric_matrix(p, window, n_max)
    return complex(op.matrix[0, 0])


def norm_lower_bound_check(p: MonotonePolynomial, window) -> BoundCheck:
    """||X + alpha I|| >= |alpha|, returned as the inequality |alpha| <= ||p||."""
    idx = p.indices
    if idx and not window.lo < idx[0]:
        raise PreconditionError(f"window {window} must start strictly below mode {idx[0]}")
    n_max = min(window.d, p.max_length + 1)
    norm = operator_norm(numeric_matrix(p, window, max(n_max, 1)).matrix)
    alpha = abs(complex(infinity_state(p)))
    return BoundCheck(alpha, norm, settings.tolerance)


def s_generator(i: int) -> MonotonePolynomial:
    """s_i = a_i + a+_i."""
    return MonotonePolynomial([(Lambda((), (i,)), 1), (Lambda((i,), ()), 1)])


@dataclass(frozen=True)
class IdentityCheck:
    expansion: MonotonePolynomial
    structural: bool
    oracle_residual: float
    relation_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.oracle_residual <= self.tolerance
            and self.relation_residual <= self.tolerance
            and (self.structural or self.oracle_residual <= self.tolerance)
        )


def s_generator_identity_check(i: int) -> IdentityCheck:
    """s_i s_{i+1}^2 = a+_i, plus a+_{i+1} a_{i+1} = a_i a+_i - a_{i+1} a+_{i+1} numerically."""
    s_next = s_generator(i + 1)
    expansion = s_generator(i) * s_next * s_next
    target = MonotonePolynomial.from_form(Lambda((i,), ()))
    structural = simplify(expansion) == target
    window = ModeWindow(i - 1, i + 2)
    n_max = window.d
    oracle = float(np.max(np.abs(
        numeric_matrix(expansion, window, n_max).matrix - numeric_matrix(target, window, n_max).matrix
    )))
    lhs = MonotonePolynomial.from_form(Lambda((i + 1,), (i + 1,)))
    rhs = MonotonePolynomial.from_form(Pi((), i, ())) - MonotonePolynomial.from_form(Pi((), i + 1, ()))
    relation = float(np.max(np.abs(
        numeric_matrix(lhs, window, n_max).matrix - numeric_matrix(rhs, window, n_max).matrix
    )))
    if not structural:
        logger.info(f"s-generator identity at {i} needed the numeric oracle")
    return IdentityCheck(expansion, structural, oracle, relation, 1e-12)
