"""Surface syntax for polynomials in creation and annihilation letters.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := [coeff '*'] factor+
    factor := ('a'|'c') '(' integer ')' | '1'
    coeff  := decimal | decimal 'i' | '(' decimal ',' decimal ')'

Whitespace is ignored. a(i) annihilates mode i, c(i) creates it, 1 is the
identity.
"""
import re
from dataclasses import dataclass
from typing import NamedTuple

import sympy

from app.errors import ExpressionSyntaxError
from app.monotone_symbolic import MonotonePolynomial, format_coefficient
from app.words import ANNIHILATOR, CREATOR, Letter, ObservableWord

_DECIMAL = re.compile(r"-?\d+(?:\.\d+)?")
_INTEGER = re.compile(r"-?\d+")
_ALLOWED = set("ac0123456789.i()*+-, \t\r\n")


class ExpressionTerm(NamedTuple):
    coeff: sympy.Expr
    word: ObservableWord


@dataclass(frozen=True)
class Expression:
    """Unreduced linear combination of words, in input order."""
    terms: tuple[ExpressionTerm, ...]

    def to_polynomial(self) -> MonotonePolynomial:
        return MonotonePolynomial.from_words((t.coeff, t.word) for t in self.terms)

    def observable(self) -> list[tuple[complex, ObservableWord]]:
        return [(complex(t.coeff), t.word) for t in self.terms]

    @property
    def is_single_word(self) -> bool:
        return len(self.terms) == 1 and self.terms[0].coeff == 1

    def __str__(self) -> str:
        return format_expression(self)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, offset: int | None = None) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, self.pos if offset is None else offset, self.text)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            found = self.peek() or "end of input"
            raise self.error(f"expected '{char}', found {found!r}")
        self.pos += 1

    def match(self, pattern: re.Pattern, what: str) -> str:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def expression(self) -> Expression:
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.peek() == "-" else 1
            self.pos += 1
        terms = [self.term(sign)]
        while self.peek():
            op = self.peek()
            if op not in "+-":
                raise self.error(f"expected '+' or '-', found {op!r}")
            self.pos += 1
            terms.append(self.term(-1 if op == "-" else 1))
        return Expression(tuple(terms))

    def _identity_factor_here(self) -> bool:
        if self.peek() != "1":
            return False
        nxt = self.text[self.pos + 1:self.pos + 2]
        return not (nxt.isdigit() or nxt in (".", "i"))

    def coefficient(self) -> sympy.Expr | None:
        start = self.pos
        if self.peek() == "(":
            self.pos += 1
            re_part = sympy.Rational(self.match(_DECIMAL, "decimal"))
            self.expect(",")
            im_part = sympy.Rational(self.match(_DECIMAL, "decimal"))
            self.expect(")")
            self.expect("*")
            return re_part + im_part * sympy.I
        ch = self.peek()
        if not ch.isdigit():
            return None
        if self._identity_factor_here():
            # "1" followed by '*' is a coefficient, otherwise the identity factor
            save = self.pos
            self.pos += 1
            if self.peek() == "*":
                self.pos += 1
                return sympy.Integer(1)
            self.pos = save
            return None
        value = sympy.Rational(self.match(_DECIMAL, "decimal"))
        if self.text[self.pos:self.pos + 1] == "i":
            self.pos += 1
            value = value * sympy.I
        if self.peek() != "*":
            raise self.error("expected '*' after coefficient", self.pos if self.peek() else start)
        self.pos += 1
        return value

    def term(self, sign: int) -> ExpressionTerm:
        coeff = self.coefficient()
        letters: list[Letter] = []
        count = 0
        while True:
            ch = self.peek()
            if ch in (CREATOR, ANNIHILATOR):
                self.pos += 1
                self.expect("(")
                mode = int(self.match(_INTEGER, "integer"))
                self.expect(")")
                letters.append(Letter(ch, mode))
            elif ch == "1" and self._identity_factor_here():
                self.pos += 1
            else:
                break
            count += 1
        if not count:
            found = self.peek() or "end of input"
            raise self.error(f"expected a factor a(i), c(i) or 1, found {found!r}")
        value = sympy.Integer(1) if coeff is None else coeff
        return ExpressionTerm(sign * value, ObservableWord(tuple(letters)))


def parse_expression(text: str) -> Expression:
    """Parse an expression.

    Raises:
        ExpressionSyntaxError: With the 0-based offset of the first problem;
            characters outside the grammar are all listed.
    """
    unknown = [(i, ch) for i, ch in enumerate(text) if ch not in _ALLOWED]
    if unknown:
        listed = ", ".join(f"{ch!r}@{i}" for i, ch in unknown)
        raise ExpressionSyntaxError(f"unknown tokens {listed}", unknown[0][0], text)
    if not text.strip():
        raise ExpressionSyntaxError("empty expression", 0, text)
    return _Parser(text).expression()


def format_expression(expr: Expression) -> str:
    """Canonical text; parsing it gives back the same terms."""
    out = []
    for coeff, word in expr.terms:
        negative = sympy.im(coeff) == 0 and sympy.re(coeff) < 0
        magnitude = -coeff if negative else coeff
        text = str(word)
        body = text if magnitude == 1 else f"{format_coefficient(magnitude)}*{text}"
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)
