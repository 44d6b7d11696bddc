"""Machinery for commutator-free Magnus-type schemes.

Covers the closed-form word coefficients of the exact flow exponential, the
truncated fixture for cross-checking it, shifted Legendre polynomials, the
order-eight Gauss rule with exact radical nodes/weights, and the linear map
between exponent coefficients (one per generator) and per-node coefficients
(one per quadrature node).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp

from .ncexpr import (
    Exponential,
    NCExpression,
    Symbol,
    commutator,
    product,
    scaled,
    summed,
)
from .rings import GUARD_DIGITS, default_digits
from .words import GradedAlphabet, Word, lyndon_words_of_odd_grade_up_to


def magnus_alphabet(K: int) -> GradedAlphabet:
    """Generators A1..AK with grade(Ak) = k."""
    return GradedAlphabet(
        tuple(f"A{k}" for k in range(1, K + 1)), tuple(range(1, K + 1))
    )


def magnus_word_coefficient(degrees: Sequence[int]) -> Fraction:
    """Coefficient of the word A_{d_1}...A_{d_l} in the exact flow exponential.

    Evaluates the explicit sum over index tuples (k_1..k_l), 1 <= k_j <= d_j,
    of the product over j of
    (-1)^(d_j+k_j) * C(d_j-1, k_j-1) * C(d_j+k_j-2, k_j-1) / (k_j + ... + k_l).
    The empty word gives 1.
    """
    degrees = list(degrees)
    if any(d < 1 for d in degrees):
        raise ValueError(f"degrees must be positive integers, got {degrees}")
    total = Fraction(0)
    if not degrees:
        return Fraction(1)
    for ks in itertools.product(*[range(1, d + 1) for d in degrees]):
        term = Fraction(1)
        for j, (d, k) in enumerate(zip(degrees, ks)):
            numerator = (-1) ** (d + k) * math.comb(d - 1, k - 1) * math.comb(d + k - 2, k - 1)
            term *= Fraction(numerator, sum(ks[j:]))
        total += term
    return total


def magnus_rhs_for_word(w: Word) -> Fraction:
    """Closed-form target coefficient for a word over a Magnus alphabet."""
    return magnus_word_coefficient([w.alphabet.grades[i] for i in w.letters])


def magnus_series_fixture(alphabet: GradedAlphabet | None = None) -> NCExpression:
    """Truncation of the flow exponent through grade 5 (test fixture).

    Exponentiating this and comparing with the closed-form coefficients on all
    words of grade <= 5 is the consistency check between the two routes.
    """
    if alphabet is None:
        alphabet = magnus_alphabet(5)
    a1, a2, a3 = (Symbol(alphabet, i) for i in range(3))
    return summed(
        [
            a1,
            scaled(Fraction(-1, 6), commutator(a1, a2)),
            scaled(Fraction(1, 60), commutator(a1, commutator(a1, a3))),
            scaled(Fraction(-1, 60), commutator(a2, commutator(a1, a2))),
            scaled(Fraction(1, 360), commutator(a1, commutator(a1, commutator(a1, a2)))),
            scaled(Fraction(-1, 30), commutator(a2, a3)),
        ]
    )


def legendre_poly_eval(k: int, x):
    """Shifted Legendre polynomial on [0, 1], exact for rational arguments."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    sign = -1 if k % 2 else 1
    total = None
    for j in range(k + 1):
        coeff = sign * (-1) ** j * math.comb(k, j) * math.comb(k + j, j)
        term = coeff * x**j if j else Fraction(coeff)
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class QuadratureRule:
    """Interpolatory rule on [0, 1] with exact radical nodes and weights."""

    name: str
    node_exprs: tuple[str, ...]
    weight_exprs: tuple[str, ...]

    def evaluated(self, digits: int | None = None):
        """Nodes and weights as mpf lists at the requested precision."""
        if digits is None:
            digits = default_digits()
        with mp.workdps(digits + GUARD_DIGITS):
            s30 = mpmath.sqrt(mpmath.mpf(30))
            half = mpmath.mpf(1) / 2
            lo = mpmath.sqrt((15 - 2 * s30) / 140)
            hi = mpmath.sqrt((15 + 2 * s30) / 140)
            nodes = [half - hi, half - lo, half + lo, half + hi]
            w_out = mpmath.mpf(1) / 4 - s30 / 72
            w_in = mpmath.mpf(1) / 4 + s30 / 72
            weights = [w_out, w_in, w_in, w_out]
        return nodes, weights

    def to_json_dict(self, digits: int | None = None) -> dict:
        if digits is None:
            digits = default_digits()
        nodes, weights = self.evaluated(digits)
        return {
            "name": self.name,
            "nodes": [mpmath.nstr(x, digits) for x in nodes],
            "weights": [mpmath.nstr(x, digits) for x in weights],
            "digits": digits,
        }


def gauss_rule_order8() -> QuadratureRule:
    """Four-point Gauss rule on [0, 1]: exact for polynomials of degree <= 7."""
    return QuadratureRule(
        name="gauss-4",
        node_exprs=(
            "1/2 - sqrt((15 + 2*sqrt(30))/140)",
            "1/2 - sqrt((15 - 2*sqrt(30))/140)",
            "1/2 + sqrt((15 - 2*sqrt(30))/140)",
            "1/2 + sqrt((15 + 2*sqrt(30))/140)",
        ),
        weight_exprs=(
            "1/4 - sqrt(30)/72",
            "1/4 + sqrt(30)/72",
            "1/4 + sqrt(30)/72",
            "1/4 - sqrt(30)/72",
        ),
    )


@dataclass
class SchemeParameters:
    """J x K exponent coefficients (row j feeds the j-th exponential)."""

    rows: list[list]

    @property
    def J(self) -> int:
        return len(self.rows)

    @property
    def K(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def from_half_rows(cls, half_rows: Sequence[Sequence]) -> "SchemeParameters":
        """Build the full row set from rows 1..J/2 via the mirror sign rule."""
        rows = [list(r) for r in half_rows]
        mirrored = [
            [(x if (k + 1) % 2 == 1 else _exact_neg(x)) for k, x in enumerate(row)]
            for row in reversed(rows)
        ]
        return cls(rows + mirrored)

    def mirror_errors(self):
        """Deviations from f[J-j+1][k] = (-1)^(k+1) f[j][k], for verification."""
        J, K = self.J, self.K
        out = []
        for j in range(J):
            for k in range(K):
                sign = 1 if (k + 1) % 2 == 1 else -1
                out.append(abs(self.rows[J - 1 - j][k] - sign * self.rows[j][k]))
        return out


@dataclass
class QuadratureScheme:
    """J x L per-node coefficients together with the rule that defined them."""

    rows: list[list]
    rule: QuadratureRule

    @property
    def J(self) -> int:
        return len(self.rows)


def _node_matrix(rule: QuadratureRule, K: int, digits: int):
    """M[l][k] = (2k-1) * w_l * P_{k-1}(x_l); rows map exponent to node basis."""
    nodes, weights = rule.evaluated(digits)
    return [
        [(2 * k - 1) * weights[l] * legendre_poly_eval(k - 1, nodes[l]) for k in range(1, K + 1)]
        for l in range(len(nodes))
    ]


def quadrature_map(
    f: SchemeParameters, rule: QuadratureRule | None = None, digits: int | None = None
) -> QuadratureScheme:
    """Per-node coefficients a[j][l] = sum_k f[j][k] (2k-1) w_l P_{k-1}(x_l)."""
    if rule is None:
        rule = gauss_rule_order8()
    if digits is None:
        digits = default_digits()
    if f.K != 4:
        raise ValueError("the order-eight rule maps exactly four exponent columns")
    with mp.workdps(digits + GUARD_DIGITS):
        matrix = _node_matrix(rule, f.K, digits)
        rows = []
        for row in f.rows:
            coerced = [_to_mp(x) for x in row]
            rows.append(
                [sum(matrix[l][k] * coerced[k] for k in range(f.K)) for l in range(len(matrix))]
            )
    return QuadratureScheme(rows, rule)


def inverse_quadrature_map(
    a: QuadratureScheme | Sequence[Sequence], rule: QuadratureRule | None = None,
    digits: int | None = None,
) -> SchemeParameters:
    """Recover exponent coefficients from per-node rows (4x4 solve per row)."""
    if isinstance(a, QuadratureScheme):
        rows, rule = a.rows, a.rule
    else:
        rows = [list(r) for r in a]
        if rule is None:
            rule = gauss_rule_order8()
    if digits is None:
        digits = default_digits()
    K = len(rows[0])
    with mp.workdps(digits + GUARD_DIGITS):
        matrix = mpmath.matrix(_node_matrix(rule, K, digits))
        out = []
        for row in rows:
            rhs = mpmath.matrix([_to_mp(x) for x in row])
            out.append(list(mpmath.lu_solve(matrix, rhs)))
    return SchemeParameters(out)


def _to_mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpc(x) if isinstance(x, complex) else x


def _exact_neg(x):
    # mpmath rounds plain negation to the ambient precision; avoid that
    if isinstance(x, mpmath.mpf):
        return mpmath.fneg(x, exact=True)
    if isinstance(x, mpmath.mpc):
        return mp.make_mpc(
            (
                mpmath.fneg(x.real, exact=True)._mpf_,
                mpmath.fneg(x.imag, exact=True)._mpf_,
            )
        )
    return -x


@dataclass
class PositivityResult:
    per_row: list[bool]
    passed: bool


def positivity_check(f: SchemeParameters) -> PositivityResult:
    """Strict positivity of the real part of each row's grade-1 coefficient."""
    per_row = []
    for row in f.rows:
        x = row[0]
        re = x.real if isinstance(x, (mpmath.mpc, complex)) else x
        per_row.append(re > 0)
    return PositivityResult(per_row, all(per_row))


def assemble_scheme_expression(
    f: SchemeParameters, alphabet: GradedAlphabet | None = None
) -> NCExpression:
    """Product of exponentials for the rows, last row applied first.

    Row j of ``f`` supplies the j-th exponent counted from the right, so the
    printed product reads row J down to row 1.
    """
    if alphabet is None:
        alphabet = magnus_alphabet(len(f.rows[0]))
    factors = []
    for row in reversed(f.rows):
        terms = [scaled(x, Symbol(alphabet, k)) for k, x in enumerate(row)]
        factors.append(Exponential(summed(terms)))
    return product(factors)


def eighth_order_condition_sets(alphabet: GradedAlphabet | None = None):
    """The 22 odd-grade Lyndon conditions through grade 8, partitioned.

    Returns three (words, rhs) pairs: words over the first two generators
    only, words containing the third generator but not the fourth, and words
    containing the fourth.  Each keeps the (grade, lexicographic) order.
    """
    if alphabet is None:
        alphabet = magnus_alphabet(4)
    words = lyndon_words_of_odd_grade_up_to(alphabet, 8)
    w12: list[Word] = []
    w3: list[Word] = []
    w4: list[Word] = []
    for w in words:
        letters = set(w.letters)
        if letters <= {0, 1}:
            w12.append(w)
        elif 3 in letters:
            w4.append(w)
        else:
            w3.append(w)
    return (
        (w12, [magnus_rhs_for_word(w) for w in w12]),
        (w3, [magnus_rhs_for_word(w) for w in w3]),
        (w4, [magnus_rhs_for_word(w) for w in w4]),
    )


def scheme_to_json_dict(
    f: SchemeParameters,
    a: QuadratureScheme,
    digits: int,
    is_complex: bool,
) -> dict:
    from .rings import mpc_str

    def show(x):
        if is_complex:
            return mpc_str(x, digits)
        return mpmath.nstr(mpmath.mpf(x.real) if isinstance(x, mpmath.mpc) else mpmath.mpf(x), digits)

    return {
        "J": f.J,
        "K": f.K,
        "rule": a.rule.to_json_dict(digits),
        "f": [[show(x) for x in row] for row in f.rows],
        "a": [[show(x) for x in row] for row in a.rows],
        "complex": is_complex,
    }


def scheme_from_json_dict(doc: dict, digits: int | None = None) -> SchemeParameters:
    from .rings import mpc_from_str

    if digits is None:
        digits = default_digits()
    rows = []
    with mp.workdps(digits + GUARD_DIGITS):
        for row in doc["f"]:
            if doc.get("complex"):
                rows.append([mpc_from_str(x) for x in row])
            else:
                rows.append([mpmath.mpf(x) for x in row])
    return SchemeParameters(rows)
