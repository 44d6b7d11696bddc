"""Brute-force truncated series over the free associative algebra.

This is the independent ground truth for the word-coefficient engine: it
expands expressions into explicit word-to-scalar maps, truncated by grade, by
doing nothing cleverer than term-by-term arithmetic.  It deliberately shares
only the expression tree with the engine, none of the coefficient code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ncexpr import (
    Commutator,
    Exponential,
    IntegerPower,
    NCExpression,
    NonzeroConstantTermError,
    Product,
    Scalar,
    ScalarMultiple,
    Sum,
    Symbol,
)
from .rings import RATIONAL_RING, ScalarRing
from .wcoeff import infer_ring
from .words import GradedAlphabet, Word


class TruncationError(ValueError):
    """A coefficient beyond the series truncation grade was requested."""


@dataclass
class TruncatedSeries:
    """Grade-truncated element of the free algebra: word -> scalar."""

    alphabet: GradedAlphabet
    max_grade: int
    coefficients: dict[tuple[int, ...], object] = field(default_factory=dict)
    ring: ScalarRing = RATIONAL_RING

    def _grade(self, letters: tuple[int, ...]) -> int:
        return sum(self.alphabet.grades[i] for i in letters)

    def coeff(self, w: Word):
        if w.grade > self.max_grade:
            raise TruncationError(
                f"word {w} has grade {w.grade} beyond truncation {self.max_grade}"
            )
        return self.coefficients.get(w.letters, self.ring.zero())

    def words(self) -> list[Word]:
        return [Word(self.alphabet, letters) for letters in sorted(self.coefficients)]

    def restricted(self, max_grade: int) -> "TruncatedSeries":
        coeffs = {
            letters: c
            for letters, c in self.coefficients.items()
            if self._grade(letters) <= max_grade
        }
        return TruncatedSeries(self.alphabet, max_grade, coeffs, self.ring)

    def _clean(self) -> "TruncatedSeries":
        self.coefficients = {
            k: c for k, c in self.coefficients.items() if not self.ring.is_zero(c)
        }
        return self

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = self.ring.add(out[k], c) if k in out else c
        return TruncatedSeries(self.alphabet, self.max_grade, out, self.ring)._clean()

    def scale(self, s) -> "TruncatedSeries":
        s = self.ring.coerce(s)
        out = {k: self.ring.mul(s, c) for k, c in self.coefficients.items()}
        return TruncatedSeries(self.alphabet, self.max_grade, out, self.ring)._clean()

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        grades = self.alphabet.grades
        left = [(k, sum(grades[i] for i in k), c) for k, c in self.coefficients.items()]
        out: dict[tuple[int, ...], object] = {}
        for k2, c2 in other.coefficients.items():
            g2 = sum(grades[i] for i in k2)
            for k1, g1, c1 in left:
                if g1 + g2 > self.max_grade:
                    continue
                key = k1 + k2
                term = self.ring.mul(c1, c2)
                out[key] = self.ring.add(out[key], term) if key in out else term
        return TruncatedSeries(self.alphabet, self.max_grade, out, self.ring)._clean()

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self.add(other.scale(Fraction(-1)))

    def equals(self, other: "TruncatedSeries") -> bool:
        keys = set(self.coefficients) | set(other.coefficients)
        zero = self.ring.zero()
        return all(
            self.ring.eq(
                self.coefficients.get(k, zero), other.coefficients.get(k, zero)
            )
            for k in keys
        )

    def to_dict(self) -> dict[str, object]:
        """Printable word -> coefficient map (words in lexicographic order)."""
        out = {}
        for letters in sorted(self.coefficients):
            out[str(Word(self.alphabet, letters))] = self.coefficients[letters]
        return out


def _identity(alphabet, max_grade, ring) -> TruncatedSeries:
    return TruncatedSeries(alphabet, max_grade, {(): ring.one()}, ring)


def _alphabet_of(e: NCExpression) -> GradedAlphabet | None:
    if isinstance(e, Symbol):
        return e.alphabet
    for attr in ("terms", "factors"):
        for child in getattr(e, attr, ()):
            found = _alphabet_of(child)
            if found is not None:
                return found
    for attr in ("operand", "base", "left", "right"):
        child = getattr(e, attr, None)
        if isinstance(child, NCExpression):
            found = _alphabet_of(child)
            if found is not None:
                return found
    return None


def series_of(
    X: NCExpression,
    max_grade: int,
    ring: ScalarRing | None = None,
    alphabet: GradedAlphabet | None = None,
) -> TruncatedSeries:
    """Expand an expression into its truncated word series."""
    if ring is None:
        ring = infer_ring(X)
    if alphabet is None:
        alphabet = _alphabet_of(X)
        if alphabet is None:
            alphabet = GradedAlphabet((), ())
    if isinstance(X, Symbol):
        coeffs = {}
        if alphabet.grades[X.index] <= max_grade:
            coeffs[(X.index,)] = ring.one()
        return TruncatedSeries(alphabet, max_grade, coeffs, ring)
    if isinstance(X, Scalar):
        s = ring.coerce(X.value)
        series = TruncatedSeries(alphabet, max_grade, {(): s}, ring)
        return series._clean()
    if isinstance(X, Sum):
        out = TruncatedSeries(alphabet, max_grade, {}, ring)
        for t in X.terms:
            out = out.add(series_of(t, max_grade, ring, alphabet))
        return out
    if isinstance(X, ScalarMultiple):
        return series_of(X.operand, max_grade, ring, alphabet).scale(X.scalar)
    if isinstance(X, Product):
        out = _identity(alphabet, max_grade, ring)
        for f in X.factors:
            out = out.mul(series_of(f, max_grade, ring, alphabet))
        return out
    if isinstance(X, IntegerPower):
        base = series_of(X.base, max_grade, ring, alphabet)
        out = _identity(alphabet, max_grade, ring)
        for _ in range(X.exponent):
            out = out.mul(base)
        return out
    if isinstance(X, Commutator):
        left = series_of(X.left, max_grade, ring, alphabet)
        right = series_of(X.right, max_grade, ring, alphabet)
        return left.mul(right).sub(right.mul(left))
    if isinstance(X, Exponential):
        inner = series_of(X.operand, max_grade, ring, alphabet)
        if inner.coefficients.get((), None) is not None:
            raise NonzeroConstantTermError(
                "exponential operand has nonzero identity coefficient"
            )
        out = _identity(alphabet, max_grade, ring)
        term = _identity(alphabet, max_grade, ring)
        for k in range(1, max_grade + 1):
            term = term.mul(inner)
            if not term.coefficients:
                break
            out = out.add(term.scale(Fraction(1, _factorial(k))))
        return out
    raise TypeError(f"unknown expression node {X!r}")


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def series_coeff(s: TruncatedSeries, w: Word):
    """Stored coefficient of w, or zero; grade overflow is an error."""
    return s.coeff(w)
