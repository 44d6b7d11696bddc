"""Exact and high-precision scalar arithmetic behind the coefficient engines.

Three scalar domains are supported: exact rationals (``fractions.Fraction``),
multivariate polynomials over the rationals (:class:`expocon.poly.PolyRational`)
and arbitrary-precision complex numbers (``mpmath.mpc``).  The small
:class:`ScalarRing` contract makes the word-coefficient recursion generic over
all three.
"""

from __future__ import annotations

import os
from decimal import Decimal
from fractions import Fraction

import mpmath
from mpmath import mp

Rational = Fraction

DEFAULT_DIGITS = 64
GUARD_DIGITS = 10


class NotRationalError(ValueError):
    """No acceptable rational approximant exists for the given value."""


def default_digits() -> int:
    """Working precision in decimal digits (overridable via EXPOCON_DIGITS)."""
    env = os.environ.get("EXPOCON_DIGITS")
    if env:
        digits = int(env)
        if digits < 16:
            raise ValueError("EXPOCON_DIGITS must be at least 16")
        return digits
    return DEFAULT_DIGITS


def rat_str(q: Fraction) -> str:
    """Serialize a rational as "p/q" (plain integer when the denominator is 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rat_from_str(text: str) -> Fraction:
    return Fraction(text.strip())


def to_fraction(x) -> Fraction:
    """Exact rational value of an mpmath float (binary mantissa times 2^exp)."""
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"cannot convert non-finite value {x} to a fraction")
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    value = Fraction(int(man))
    value = value * Fraction(2) ** int(exp)
    return -value if sign else value


def mpf_from_fraction(q: Fraction):
    """Convert a rational to mpf at the current working precision."""
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator)


def rationalize(x, max_denominator: int = 10**6, digits: int | None = None) -> Fraction:
    """Recover the exact rational closest to a high-precision value.

    Uses the continued-fraction best approximant with denominator bounded by
    ``max_denominator`` and accepts it only if it matches ``x`` to roughly half
    the working precision, which is robust against last-digit noise.
    """
    if digits is None:
        digits = mp.dps
    tol = Fraction(1, 10 ** (digits // 2))
    z = mpmath.mpmathify(x)
    if isinstance(z, mpmath.mpc):
        if abs(to_fraction(z.imag)) > tol:
            raise NotRationalError(f"imaginary part of {z} exceeds tolerance {tol}")
        z = z.real
    exact = to_fraction(z)
    candidate = exact.limit_denominator(max_denominator)
    if abs(candidate - exact) > tol:
        raise NotRationalError(
            f"no rational with denominator <= {max_denominator} within {tol} of {z}"
        )
    return candidate


def mpc_str(z, digits: int | None = None) -> str:
    """Serialize a complex value as "(re, im)@digits".

    Stored values are rendered directly; reconstructing them would round to
    the ambient precision and silently discard digits.
    """
    if digits is None:
        digits = mp.dps
    if isinstance(z, mpmath.mpc):
        re, im = z.real, z.imag
    elif isinstance(z, mpmath.mpf):
        re, im = z, mpmath.mpf(0)
    else:
        with mp.workdps(digits + GUARD_DIGITS):
            z = mpmath.mpc(z)
        re, im = z.real, z.imag
    return f"({mpmath.nstr(re, digits)}, {mpmath.nstr(im, digits)})@{digits}"


def mpc_from_str(text: str):
    """Parse the "(re, im)@digits" serialization (also accepts bare decimals)."""
    text = text.strip()
    if "@" in text:
        body, _, digits = text.rpartition("@")
        digits = int(digits)
    else:
        body, digits = text, mp.dps
    body = body.strip()
    if body.startswith("(") and body.endswith(")"):
        re_text, _, im_text = body[1:-1].partition(",")
        with mp.workdps(max(digits + GUARD_DIGITS, mp.dps)):
            return mpmath.mpc(mpmath.mpf(re_text.strip()), mpmath.mpf(im_text.strip()))
    with mp.workdps(max(digits + GUARD_DIGITS, mp.dps)):
        return mpmath.mpc(mpmath.mpf(body))


def decimal_str(x, digits: int) -> str:
    """Deterministic decimal rendering of an mpf at the given digit count."""
    return mpmath.nstr(mpmath.mpf(x), digits)


def exact_conj(z):
    """Complex conjugate without rounding to the ambient precision."""
    if isinstance(z, mpmath.mpf):
        return z
    z = mpmath.mpc(z) if not isinstance(z, mpmath.mpc) else z
    return mp.make_mpc((z.real._mpf_, mpmath.fneg(z.imag, exact=True)._mpf_))


class ScalarRing:
    """Commutative-ring contract shared by all scalar domains.

    Concrete rings supply ``zero``/``one`` constructors, an exact zero test and
    a coercion from rationals; the arithmetic itself is carried by the scalar
    values' operators.
    """

    name = "ring"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        raise NotImplementedError

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def eq(self, x, y) -> bool:
        return x == y

    def from_rational(self, q: Fraction):
        raise NotImplementedError

    def coerce(self, value):
        """Map a raw scalar (as stored in an expression) into this ring."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name}>"


class RationalRing(ScalarRing):
    name = "rational"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def is_zero(self, x) -> bool:
        return x == 0

    def from_rational(self, q: Fraction):
        return Fraction(q)

    def coerce(self, value):
        if isinstance(value, (Fraction, int)):
            return Fraction(value)
        constant = getattr(value, "constant_value", None)
        if constant is not None and callable(constant):
            return Fraction(constant())
        raise TypeError(f"cannot coerce {value!r} into the rational ring")


class MPComplexRing(ScalarRing):
    """Arbitrary-precision complex scalars at a fixed decimal precision."""

    name = "mpcomplex"

    def __init__(self, digits: int | None = None):
        self.digits = digits if digits is not None else default_digits()

    def workdps(self):
        """Context manager running mpmath at this ring's guarded precision."""
        return mp.workdps(self.digits + GUARD_DIGITS)

    def zero(self):
        return mpmath.mpc(0)

    def one(self):
        return mpmath.mpc(1)

    def is_zero(self, x) -> bool:
        return x == 0

    def from_rational(self, q: Fraction):
        q = Fraction(q)
        return mpmath.mpc(mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator))

    def coerce(self, value):
        if isinstance(value, (Fraction, int)):
            return self.from_rational(Fraction(value))
        if isinstance(value, (mpmath.mpc, mpmath.mpf, float, complex)):
            return mpmath.mpc(value)
        raise TypeError(f"cannot coerce {value!r} into the complex ring")

    def __repr__(self):
        return f"<mpcomplex digits={self.digits}>"


RATIONAL_RING = RationalRing()
