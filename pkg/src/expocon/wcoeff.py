"""Word-coefficient engine.

For a word w of length n, the expression X is mapped to the square matrix of
its subword coefficients (upper triangular of size n+1); this map is an
algebra homomorphism, so the matrix of X follows recursively from the matrices
of its subexpressions.  Exponentials become exponentials of strictly upper
triangular matrices, hence terminate after at most n applications.  The
recursion below never materializes the matrix; it only propagates its action
on one vector.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .ncexpr import (
    Commutator,
    Exponential,
    IntegerPower,
    NCExpression,
    NonzeroConstantTermError,
    Product,
    Scalar,
    ScalarMultiple,
    ShapeError,
    Sum,
    Symbol,
)
from .poly import PolyRational, PolyRing
from .rings import RATIONAL_RING, MPComplexRing, ScalarRing
from .words import Word


def _collect_scalars(e: NCExpression, out: list):
    if isinstance(e, (Scalar, ScalarMultiple)):
        out.append(e.value if isinstance(e, Scalar) else e.scalar)
    for attr in ("terms", "factors"):
        for child in getattr(e, attr, ()):
            _collect_scalars(child, out)
    for attr in ("operand", "base", "left", "right"):
        child = getattr(e, attr, None)
        if isinstance(child, NCExpression):
            _collect_scalars(child, out)


def infer_ring(e: NCExpression, digits: int | None = None) -> ScalarRing:
    """Pick the scalar ring an expression lives in.

    Polynomials win over rationals; any mpmath scalar switches to the complex
    ring.  Mixing polynomials and numeric scalars in one expression is not
    supported (substitute parameters first).
    """
    scalars: list = []
    _collect_scalars(e, scalars)
    poly_vars: list[str] = []
    seen = set()
    numeric = False
    for s in scalars:
        if isinstance(s, PolyRational):
            for v in s.variables:
                if v not in seen:
                    seen.add(v)
                    poly_vars.append(v)
        elif isinstance(s, (mpmath.mpf, mpmath.mpc, float, complex)):
            numeric = True
    if poly_vars and numeric:
        raise TypeError("expression mixes polynomial and numeric scalars")
    if poly_vars:
        return PolyRing(tuple(poly_vars))
    if numeric:
        return MPComplexRing(digits)
    return RATIONAL_RING


def constant_term(e: NCExpression, ring: ScalarRing | None = None):
    """Identity-word coefficient, validating every exponential on the way.

    This is the length-zero instance of the same recursion; it exists so the
    zero-constant-term hypothesis on exponential operands is enforced rather
    than assumed.
    """
    if ring is None:
        ring = infer_ring(e)
    if isinstance(e, Symbol):
        return ring.zero()
    if isinstance(e, Scalar):
        return ring.coerce(e.value)
    if isinstance(e, Sum):
        total = ring.zero()
        for t in e.terms:
            total = ring.add(total, constant_term(t, ring))
        return total
    if isinstance(e, ScalarMultiple):
        return ring.mul(ring.coerce(e.scalar), constant_term(e.operand, ring))
    if isinstance(e, Product):
        total = ring.one()
        for f in e.factors:
            total = ring.mul(total, constant_term(f, ring))
        return total
    if isinstance(e, IntegerPower):
        base = constant_term(e.base, ring)
        total = ring.one()
        for _ in range(e.exponent):
            total = ring.mul(total, base)
        return total
    if isinstance(e, Commutator):
        a = constant_term(e.left, ring)
        b = constant_term(e.right, ring)
        return ring.add(ring.mul(a, b), ring.neg(ring.mul(b, a)))
    if isinstance(e, Exponential):
        inner = constant_term(e.operand, ring)
        if not ring.is_zero(inner):
            raise NonzeroConstantTermError(
                "exponential operand has nonzero identity coefficient "
                f"({inner}); coefficients of its exponential are not polynomial"
            )
        return ring.one()
    raise TypeError(f"unknown expression node {e!r}")


def phiv(
    w: Word,
    X: NCExpression,
    v: list,
    ring: ScalarRing | None = None,
    early_exit: bool = True,
) -> list:
    """Apply the subword-coefficient matrix of X for word w to the vector v.

    The vector has length len(w)+1; entry i of the result collects the
    coefficients of subwords starting at position i.  ``early_exit`` stops
    product/power/exponential folds on an exactly zero vector; disabling it is
    for testing only and never changes results.
    """
    if ring is None:
        ring = infer_ring(X)
    if len(v) != len(w) + 1:
        raise ShapeError(f"vector length {len(v)} does not match word length {len(w)}")
    return _phiv(w.letters, X, list(v), ring, early_exit)


def _is_zero_vector(v, ring) -> bool:
    return all(ring.is_zero(x) for x in v)


def _phiv(letters, X, v, ring, early_exit):
    n = len(letters)
    if isinstance(X, Symbol):
        zero = ring.zero()
        out = [v[i + 1] if letters[i] == X.index else zero for i in range(n)]
        out.append(zero)
        return out
    if isinstance(X, Scalar):
        s = ring.coerce(X.value)
        return [ring.mul(s, x) for x in v]
    if isinstance(X, Sum):
        out = [ring.zero()] * (n + 1)
        for t in X.terms:
            tv = _phiv(letters, t, v, ring, early_exit)
            out = [ring.add(a, b) for a, b in zip(out, tv)]
        return out
    if isinstance(X, ScalarMultiple):
        s = ring.coerce(X.scalar)
        inner = _phiv(letters, X.operand, v, ring, early_exit)
        return [ring.mul(s, x) for x in inner]
    if isinstance(X, Product):
        v1 = v
        for f in reversed(X.factors):
            v1 = _phiv(letters, f, v1, ring, early_exit)
            if early_exit and _is_zero_vector(v1, ring):
                return v1
        return v1
    if isinstance(X, IntegerPower):
        v1 = v
        for _ in range(X.exponent):
            v1 = _phiv(letters, X.base, v1, ring, early_exit)
            if early_exit and _is_zero_vector(v1, ring):
                return v1
        return v1
    if isinstance(X, Commutator):
        a = _phiv(letters, X.left, _phiv(letters, X.right, v, ring, early_exit), ring, early_exit)
        b = _phiv(letters, X.right, _phiv(letters, X.left, v, ring, early_exit), ring, early_exit)
        return [ring.add(x, ring.neg(y)) for x, y in zip(a, b)]
    if isinstance(X, Exponential):
        inner_constant = constant_term(X.operand, ring)
        if not ring.is_zero(inner_constant):
            raise NonzeroConstantTermError(
                "exponential operand has nonzero identity coefficient "
                f"({inner_constant})"
            )
        v1 = v
        v2 = list(v)
        factorial = 1
        for i in range(1, n + 1):
            factorial *= i
            v1 = _phiv(letters, X.operand, v1, ring, early_exit)
            if early_exit and _is_zero_vector(v1, ring):
                return v2
            inv = ring.from_rational(Fraction(1, factorial))
            v2 = [ring.add(a, ring.mul(inv, b)) for a, b in zip(v2, v1)]
        return v2
    raise TypeError(f"unknown expression node {X!r}")


def wcoeff(w: Word, X: NCExpression, ring: ScalarRing | None = None, early_exit: bool = True):
    """Coefficient of the word w in the formal expansion of X."""
    if ring is None:
        ring = infer_ring(X)
    v = [ring.zero()] * len(w) + [ring.one()]
    return phiv(w, X, v, ring, early_exit)[0]
