"""Order-condition systems, leading error terms and residual verification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
from mpmath import mp

from .ncexpr import NCExpression, expression_of_bracketing, is_self_adjoint
from .oracle import series_of
from .poly import PolyRational
from .rings import GUARD_DIGITS, RATIONAL_RING, MPComplexRing, default_digits
from .wcoeff import infer_ring, wcoeff
from .words import (
    BasisElement,
    GradedAlphabet,
    Word,
    lyndon_bracketing,
    lyndon_words_of_grade,
    lyndon_words_of_odd_grade_up_to,
)


class SymmetryViolationError(ValueError):
    """The self-adjoint flag was set but an operand fails the mirror check."""


class SingularMatrixError(ValueError):
    pass


def solve_rational_system(
    matrix: Sequence[Sequence[Fraction]], rhs: Sequence
) -> list:
    """Exact Gaussian elimination; the rhs entries may live in any ring."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    b = list(rhs)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("need a square system")
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"singular matrix (column {col})")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            b[col], b[pivot] = b[pivot], b[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = b[col] * inv
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
                b[r] = b[r] - factor * b[col]
    return b


def _alphabet_of(e: NCExpression) -> GradedAlphabet:
    from .oracle import _alphabet_of as find

    alphabet = find(e)
    if alphabet is None:
        raise ValueError("expression contains no alphabet symbols")
    return alphabet


def lyndon_words_for_order(
    alphabet: GradedAlphabet, p: int, self_adjoint: bool
) -> list[Word]:
    if self_adjoint:
        return lyndon_words_of_odd_grade_up_to(alphabet, p)
    out: list[Word] = []
    for q in range(1, p + 1):
        out.extend(lyndon_words_of_grade(alphabet, q))
    return out


@dataclass
class OrderConditionSystem:
    """One equation per selected Lyndon word: lhs(word) - rhs(word) = 0."""

    words: list[Word]
    lhs: list
    rhs: list
    order: int
    self_adjoint: bool
    rhs_source: str

    def condition_polynomials(self) -> list:
        return [l - r for l, r in zip(self.lhs, self.rhs)]

    def to_json_dict(self) -> dict:
        from .rings import rat_str

        def show(value):
            if isinstance(value, Fraction):
                return rat_str(value)
            return str(value)

        return {
            "order": self.order,
            "self_adjoint": self.self_adjoint,
            "rhs_source": self.rhs_source,
            "conditions": [
                {"word": str(w), "lhs": show(l), "rhs": show(r)}
                for w, l, r in zip(self.words, self.lhs, self.rhs)
            ],
        }


def order_conditions(
    S: NCExpression,
    E: NCExpression | None,
    p: int,
    self_adjoint: bool = False,
    rhs_provider: Callable[[Word], object] | None = None,
) -> OrderConditionSystem:
    """Minimal condition system forcing agreement of S and E up to grade p.

    One condition per Lyndon word of grade <= p (odd grades only in the
    self-adjoint case).  The right-hand sides come from the coefficient engine
    applied to E, or from ``rhs_provider`` when a closed form is available.
    """
    if E is None and rhs_provider is None:
        raise ValueError("need either a target expression or an rhs provider")
    alphabet = _alphabet_of(S)
    if self_adjoint:
        if not is_self_adjoint(S, p):
            raise SymmetryViolationError("scheme fails the mirror-sign check")
        if E is not None and not is_self_adjoint(E, p):
            raise SymmetryViolationError("target fails the mirror-sign check")
    words = lyndon_words_for_order(alphabet, p, self_adjoint)
    ring = infer_ring(S)
    lhs = [wcoeff(w, S, ring) for w in words]
    if rhs_provider is not None:
        rhs = [rhs_provider(w) for w in words]
        rhs_source = "closed-form"
    else:
        rhs = [wcoeff(w, E) for w in words]
        rhs_source = "engine"
    return OrderConditionSystem(words, lhs, rhs, p, self_adjoint, rhs_source)


@dataclass
class LeadingErrorTerm:
    """Lowest-grade nonvanishing slice of an expansion, in the Lyndon basis."""

    grade: int
    basis: list[BasisElement]
    coefficients: list

    def terms(self) -> list[tuple[object, BasisElement]]:
        return list(zip(self.coefficients, self.basis))

    def to_json_dict(self) -> dict:
        from .rings import rat_str

        def show(value):
            return rat_str(value) if isinstance(value, Fraction) else str(value)

        return {
            "grade": self.grade,
            "terms": [
                {"basis": str(b), "coefficient": show(c)}
                for c, b in zip(self.coefficients, self.basis)
            ],
        }


def lyndon_coefficient_matrix(
    alphabet: GradedAlphabet, q: int
) -> tuple[list[Word], list[BasisElement], list[list[Fraction]]]:
    """Rows: Lyndon words of grade q; columns: their bracketings, expanded.

    Entry (i, j) is the coefficient of word i in the word expansion of basis
    element j.  Both orderings are lexicographic, which makes the matrix unit
    lower triangular for the alphabets exercised in the tests.
    """
    words = lyndon_words_of_grade(alphabet, q)
    basis = [lyndon_bracketing(w) for w in words]
    expanded = [
        series_of(expression_of_bracketing(b), q, RATIONAL_RING, alphabet)
        for b in basis
    ]
    matrix = [[s.coeff(w) for s in expanded] for w in words]
    return words, basis, matrix


def leading_error_term(
    X: NCExpression, q_max: int, ring=None
) -> LeadingErrorTerm | None:
    """Smallest-grade nonzero slice of X, resolved into nested commutators.

    Returns None when every Lyndon coefficient vanishes through ``q_max``
    (the success signal when verifying a scheme's order).
    """
    if ring is None:
        ring = infer_ring(X)
    alphabet = _alphabet_of(X)
    for q in range(1, q_max + 1):
        words = lyndon_words_of_grade(alphabet, q)
        if not words:
            continue
        c_w = [wcoeff(w, X, ring) for w in words]
        if all(ring.is_zero(c) for c in c_w):
            continue
        _, basis, matrix = lyndon_coefficient_matrix(alphabet, q)
        if all(isinstance(c, Fraction) for c in c_w):
            c_b = solve_rational_system(matrix, c_w)
        else:
            mat = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in matrix])
            c_b = list(mpmath.lu_solve(mat, mpmath.matrix(c_w)))
        return LeadingErrorTerm(q, basis, c_b)
    return None


def residual_of_scheme(
    S: NCExpression,
    words: Sequence[Word],
    rhs: Sequence,
    digits: int | None = None,
):
    """Largest deviation of the scheme's word coefficients from the targets.

    Exact (rational or polynomial-free) schemes give an exact rational
    residual; numeric schemes are evaluated at the requested precision and
    give an mpf bound.
    """
    ring = infer_ring(S, digits)
    if isinstance(ring, MPComplexRing):
        if digits is not None:
            ring = MPComplexRing(digits)
        with ring.workdps():
            worst = mpmath.mpf(0)
            for w, target in zip(words, rhs):
                value = wcoeff(w, S, ring)
                diff = abs(value - ring.coerce(target))
                if diff > worst:
                    worst = diff
            return worst
    worst = Fraction(0)
    for w, target in zip(words, rhs):
        value = wcoeff(w, S, ring)
        diff = abs(value - target)
        if diff > worst:
            worst = diff
    return worst
