"""Sparse multivariate polynomials with exact rational coefficients.

These carry the parametric order conditions.  Terms are stored as a map from
exponent vectors to nonzero rationals; the printed form uses a fixed graded
lexicographic order so that output is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .rings import ScalarRing, rat_str


class UnboundVariableError(KeyError):
    """A polynomial was evaluated without a value for one of its variables."""


def _strip(variables: tuple[str, ...], terms: dict) -> dict:
    return {expo: coeff for expo, coeff in terms.items() if coeff != 0}


class PolyRational:
    """Polynomial in named commuting variables over the rationals."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple[int, ...], Fraction]):
        self.variables = tuple(variables)
        clean = {}
        for expo, coeff in terms.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != len(self.variables):
                raise ValueError(
                    f"exponent vector {expo} does not match variables {self.variables}"
                )
            coeff = Fraction(coeff)
            if coeff != 0:
                clean[expo] = clean.get(expo, Fraction(0)) + coeff
        self.terms = _strip(self.variables, clean)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value, variables: Iterable[str] = ()) -> "PolyRational":
        variables = tuple(variables)
        value = Fraction(value)
        if value == 0:
            return cls(variables, {})
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, name: str) -> "PolyRational":
        return cls((name,), {(1,): Fraction(1)})

    @classmethod
    def zero(cls, variables: Iterable[str] = ()) -> "PolyRational":
        return cls(variables, {})

    # -- structural helpers ------------------------------------------------

    def used_variables(self) -> tuple[str, ...]:
        used = [False] * len(self.variables)
        for expo in self.terms:
            for i, e in enumerate(expo):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in expo) for expo in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(expo) for expo in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _monomials_by_name(self) -> dict:
        """Canonical view keyed by {variable: exponent}, for order-free equality."""
        out = {}
        for expo, coeff in self.terms.items():
            key = frozenset(
                (v, e) for v, e in zip(self.variables, expo) if e
            )
            out[key] = out.get(key, Fraction(0)) + coeff
        return {k: c for k, c in out.items() if c != 0}

    def with_variables(self, variables: Iterable[str]) -> "PolyRational":
        """Re-express over a variable tuple that must contain all used names."""
        variables = tuple(variables)
        pos = {v: i for i, v in enumerate(variables)}
        missing = [v for v in self.used_variables() if v not in pos]
        if missing:
            raise ValueError(f"target variables are missing {missing}")
        terms = {}
        for expo, coeff in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, expo):
                if e:
                    new[pos[v]] = e
            key = tuple(new)
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return PolyRational(variables, terms)

    def _aligned(self, other: "PolyRational"):
        if self.variables == other.variables:
            return self, other
        merged = list(self.variables)
        seen = set(merged)
        for v in other.variables:
            if v not in seen:
                merged.append(v)
                seen.add(v)
        return self.with_variables(merged), other.with_variables(merged)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _as_poly(value, variables) -> "PolyRational":
        if isinstance(value, PolyRational):
            return value
        return PolyRational.constant(Fraction(value), variables)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyRational.constant(other, self.variables)
        elif not isinstance(other, PolyRational):
            return NotImplemented
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for expo, coeff in b.terms.items():
            terms[expo] = terms.get(expo, Fraction(0)) + coeff
        return PolyRational(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return PolyRational(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyRational.constant(other, self.variables)
        elif not isinstance(other, PolyRational):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return PolyRational(
                self.variables, {e: c * other for e, c in self.terms.items()}
            )
        if not isinstance(other, PolyRational):
            return NotImplemented
        a, b = self._aligned(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                terms[key] = terms.get(key, Fraction(0)) + c1 * c2
        return PolyRational(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = PolyRational.constant(1, self.variables)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyRational.constant(other, self.variables)
        if not isinstance(other, PolyRational):
            return NotImplemented
        return self._monomials_by_name() == other._monomials_by_name()

    __hash__ = None

    # -- evaluation and substitution ----------------------------------------

    def evaluate(self, assignment: Mapping[str, object]):
        """Horner-style evaluation; values may be rationals or mpmath numbers."""
        for v in self.used_variables():
            if v not in assignment:
                raise UnboundVariableError(v)
        if not self.terms:
            return Fraction(0)
        order = self.variables
        grouped = self.terms
        return _horner(order, 0, grouped, assignment)

    def substitute(self, partial: Mapping[str, Fraction]) -> "PolyRational":
        """Eliminate the given variables exactly, keeping the rest symbolic."""
        if not partial:
            return self
        keep = tuple(v for v in self.variables if v not in partial)
        pos = {v: i for i, v in enumerate(keep)}
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            value = Fraction(coeff)
            new = [0] * len(keep)
            for v, e in zip(self.variables, expo):
                if v in partial:
                    value *= Fraction(partial[v]) ** e
                elif e:
                    new[pos[v]] = e
            if value != 0:
                key = tuple(new)
                terms[key] = terms.get(key, Fraction(0)) + value
        return PolyRational(keep, terms)

    def differentiate(self, var: str) -> "PolyRational":
        """Exact formal partial derivative."""
        if var not in self.variables:
            return PolyRational.zero(self.variables)
        i = self.variables.index(var)
        terms = {}
        for expo, coeff in self.terms.items():
            e = expo[i]
            if e == 0:
                continue
            new = list(expo)
            new[i] = e - 1
            key = tuple(new)
            terms[key] = terms.get(key, Fraction(0)) + coeff * e
        return PolyRational(self.variables, terms)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded lexicographic order."""
        return sorted(
            self.terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True
        )

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for expo, coeff in self.sorted_terms():
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.variables, expo)
                if e
            ]
            mag = abs(coeff)
            if factors and mag == 1:
                body = "*".join(factors)
            elif factors:
                body = "*".join([rat_str(mag)] + factors)
            else:
                body = rat_str(mag)
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"PolyRational({self})"


def _horner(variables, index, terms, assignment):
    """Evaluate {exponent-vector: coeff} recursively, one variable at a time."""
    if index == len(variables):
        return sum(terms.values(), Fraction(0))
    # group by exponent of the current variable
    groups: dict[int, dict] = {}
    for expo, coeff in terms.items():
        groups.setdefault(expo[index], {})[expo] = coeff
    degrees = sorted(groups, reverse=True)
    if degrees == [0]:
        return _horner(variables, index + 1, terms, assignment)
    x = assignment[variables[index]]
    result = None
    prev_degree = None
    for d in degrees:
        part = _horner(variables, index + 1, groups[d], assignment)
        if result is None:
            result = part
        else:
            result = result * x ** (prev_degree - d) + part
        prev_degree = d
    if prev_degree:
        result = result * x**prev_degree
    return result


def poly_evaluate(p: PolyRational, assignment: Mapping[str, object]):
    return p.evaluate(assignment)


def poly_substitute(p: PolyRational, partial: Mapping[str, Fraction]) -> PolyRational:
    return p.substitute(partial)


def differentiate(p: PolyRational, var: str) -> PolyRational:
    return p.differentiate(var)


class PolyRing(ScalarRing):
    """Ring of rational-coefficient polynomials over a fixed variable tuple."""

    name = "polynomial"

    def __init__(self, variables: Iterable[str] = ()):
        self.variables = tuple(variables)

    def zero(self):
        return PolyRational.zero(self.variables)

    def one(self):
        return PolyRational.constant(1, self.variables)

    def is_zero(self, x) -> bool:
        if isinstance(x, PolyRational):
            return x.is_zero()
        return x == 0

    def from_rational(self, q: Fraction):
        return PolyRational.constant(q, self.variables)

    def coerce(self, value):
        if isinstance(value, PolyRational):
            return value
        if isinstance(value, (Fraction, int)):
            return self.from_rational(Fraction(value))
        raise TypeError(f"cannot coerce {value!r} into the polynomial ring")

    def __repr__(self):
        return f"<polynomial vars={','.join(self.variables)}>"
