"""Noncommutative expression trees and the text grammar that feeds them.

Expressions are built from alphabet symbols by sums, ordered products, integer
powers, commutators, exponentials and scalar multiples.  Scalars are exact
rationals, polynomials in named parameters, or high-precision complex numbers;
one expression should stick to a single scalar domain (rationals embed in the
other two).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

from .poly import PolyRational
from .words import BasisElement, GradedAlphabet

ScalarValue = object  # Fraction | PolyRational | mpmath.mpc


class ExpressionSyntaxError(ValueError):
    """Malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class ShapeError(ValueError):
    """An expression does not have the structural shape an operation needs."""


class NonzeroConstantTermError(ValueError):
    """An exponential's operand has a nonzero identity coefficient."""


class NCExpression:
    """Base class; all nodes are immutable and safe to share."""

    def __add__(self, other):
        return summed([self, _as_expression(other)])

    def __radd__(self, other):
        return summed([_as_expression(other), self])

    def __sub__(self, other):
        return summed([self, scaled(Fraction(-1), _as_expression(other))])

    def __rsub__(self, other):
        return summed([_as_expression(other), scaled(Fraction(-1), self)])

    def __neg__(self):
        return scaled(Fraction(-1), self)

    def __mul__(self, other):
        if _is_scalar(other):
            return scaled(other, self)
        return product([self, other])

    def __rmul__(self, other):
        if _is_scalar(other):
            return scaled(other, self)
        return NotImplemented

    def __pow__(self, n: int):
        return power(self, n)


@dataclass(frozen=True)
class Symbol(NCExpression):
    alphabet: GradedAlphabet
    index: int

    @property
    def name(self) -> str:
        return self.alphabet.names[self.index]


@dataclass(frozen=True)
class Scalar(NCExpression):
    """A scalar multiple of the identity."""

    value: ScalarValue


@dataclass(frozen=True)
class Sum(NCExpression):
    terms: tuple[NCExpression, ...]


@dataclass(frozen=True)
class ScalarMultiple(NCExpression):
    scalar: ScalarValue
    operand: NCExpression


@dataclass(frozen=True)
class Product(NCExpression):
    factors: tuple[NCExpression, ...]


@dataclass(frozen=True)
class IntegerPower(NCExpression):
    base: NCExpression
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("integer powers must have nonnegative exponents")


@dataclass(frozen=True)
class Commutator(NCExpression):
    left: NCExpression
    right: NCExpression


@dataclass(frozen=True)
class Exponential(NCExpression):
    operand: NCExpression


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction, PolyRational, mpmath.mpf, mpmath.mpc))


def _as_expression(value) -> NCExpression:
    if isinstance(value, NCExpression):
        return value
    if _is_scalar(value):
        return Scalar(_normalize_scalar(value))
    raise TypeError(f"cannot interpret {value!r} as an expression")


def _normalize_scalar(value):
    if isinstance(value, int):
        return Fraction(value)
    return value


def _scalar_mul(a, b):
    a, b = _normalize_scalar(a), _normalize_scalar(b)
    if isinstance(a, PolyRational) or isinstance(b, PolyRational):
        return a * b
    if isinstance(a, (mpmath.mpf, mpmath.mpc)) or isinstance(b, (mpmath.mpf, mpmath.mpc)):
        av = a if isinstance(a, (mpmath.mpf, mpmath.mpc)) else _mp_from_fraction(a)
        bv = b if isinstance(b, (mpmath.mpf, mpmath.mpc)) else _mp_from_fraction(b)
        return av * bv
    return a * b


def _mp_from_fraction(q: Fraction):
    return mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator)


def _scalar_is_one(value) -> bool:
    if isinstance(value, PolyRational):
        return value.is_constant() and value.constant_value() == 1
    return value == 1


# -- canonicalizing constructors -------------------------------------------


def summed(terms: Iterable[NCExpression]) -> NCExpression:
    """Flatten nested sums and fold plain scalar terms together."""
    flat: list[NCExpression] = []
    scalar_total = None
    for t in terms:
        t = _as_expression(t)
        parts = t.terms if isinstance(t, Sum) else (t,)
        for part in parts:
            if isinstance(part, Scalar):
                scalar_total = (
                    part.value
                    if scalar_total is None
                    else scalar_total + part.value
                )
            else:
                flat.append(part)
    if scalar_total is not None:
        flat.append(Scalar(scalar_total))
    if not flat:
        return Scalar(Fraction(0))
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def scaled(scalar, operand: NCExpression) -> NCExpression:
    """Scalar multiple with nested multiples collapsed."""
    scalar = _normalize_scalar(scalar)
    operand = _as_expression(operand)
    if isinstance(operand, ScalarMultiple):
        return scaled(_scalar_mul(scalar, operand.scalar), operand.operand)
    if isinstance(operand, Scalar):
        return Scalar(_scalar_mul(scalar, operand.value))
    if _scalar_is_one(scalar):
        return operand
    return ScalarMultiple(scalar, operand)


def product(factors: Sequence[NCExpression]) -> NCExpression:
    """Ordered product; central scalar factors are pulled out front."""
    flat: list[NCExpression] = []
    scalar_total = None
    for f in factors:
        f = _as_expression(f)
        if isinstance(f, ScalarMultiple):
            scalar_total = (
                f.scalar if scalar_total is None else _scalar_mul(scalar_total, f.scalar)
            )
            f = f.operand
        if isinstance(f, Scalar):
            scalar_total = (
                f.value if scalar_total is None else _scalar_mul(scalar_total, f.value)
            )
            continue
        if isinstance(f, Product):
            flat.extend(f.factors)
        else:
            flat.append(f)
    if not flat:
        return Scalar(Fraction(1) if scalar_total is None else scalar_total)
    core = flat[0] if len(flat) == 1 else Product(tuple(flat))
    if scalar_total is None:
        return core
    return scaled(scalar_total, core)


def power(base: NCExpression, n: int) -> NCExpression:
    if n == 0:
        return Scalar(Fraction(1))
    if n == 1:
        return base
    if isinstance(base, Scalar):
        value = base.value
        out = value
        for _ in range(n - 1):
            out = _scalar_mul(out, value)
        return Scalar(out)
    if isinstance(base, ScalarMultiple):
        # scalars are central: (s X)^n = s^n X^n
        out = base.scalar
        for _ in range(n - 1):
            out = _scalar_mul(out, base.scalar)
        return scaled(out, power(base.operand, n))
    return IntegerPower(base, n)


def commutator(left: NCExpression, right: NCExpression) -> Commutator:
    return Commutator(_as_expression(left), _as_expression(right))


def exponential(operand: NCExpression) -> Exponential:
    return Exponential(_as_expression(operand))


def symbols(alphabet: GradedAlphabet) -> tuple[Symbol, ...]:
    return tuple(Symbol(alphabet, i) for i in range(len(alphabet)))


def expression_of_bracketing(b: BasisElement) -> NCExpression:
    """Turn a nested-commutator basis element into an expression tree."""
    if b.is_letter():
        return Symbol(b.alphabet, b.letter)
    return Commutator(expression_of_bracketing(b.left), expression_of_bracketing(b.right))


# -- parser ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^/(),\[\]]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExpressionSyntaxError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "int":
            tokens.append(("int", m.group("int"), m.start("int")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser for the expression grammar.

    expression := ['-'] term (('+' | '-') term)*
    term       := factor ('*' factor)*
    factor     := primary ['^' integer]
    primary    := rational | name | 'exp' '(' expression ')'
                | '[' expression ',' expression ']' | '(' expression ')'
    rational   := integer ['/' integer]
    """

    def __init__(self, text: str, alphabet: GradedAlphabet, parameters: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.alphabet = alphabet
        self.parameters = tuple(parameters)

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise ExpressionSyntaxError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def _expect_op(self, op: str):
        tok = self._next()
        if tok[0] != "op" or tok[1] != op:
            raise ExpressionSyntaxError(f"expected {op!r}, found {tok[1]!r}", tok[2])

    def _at_op(self, *ops) -> bool:
        tok = self._peek()
        return tok is not None and tok[0] == "op" and tok[1] in ops

    def parse(self) -> NCExpression:
        expr = self.expression()
        tok = self._peek()
        if tok is not None:
            raise ExpressionSyntaxError(f"trailing input starting at {tok[1]!r}", tok[2])
        return expr

    def expression(self) -> NCExpression:
        terms = []
        negate = False
        if self._at_op("-"):
            self._next()
            negate = True
        first = self.term()
        terms.append(scaled(Fraction(-1), first) if negate else first)
        while self._at_op("+", "-"):
            op = self._next()[1]
            t = self.term()
            terms.append(scaled(Fraction(-1), t) if op == "-" else t)
        return summed(terms)

    def term(self) -> NCExpression:
        factors = [self.factor()]
        while self._at_op("*"):
            self._next()
            factors.append(self.factor())
        return product(factors)

    def factor(self) -> NCExpression:
        base = self.primary()
        if self._at_op("^"):
            self._next()
            tok = self._next()
            if tok[0] != "int":
                raise ExpressionSyntaxError(
                    "exponents must be nonnegative integer literals", tok[2]
                )
            return power(base, int(tok[1]))
        return base

    def primary(self) -> NCExpression:
        tok = self._next()
        kind, value, position = tok
        if kind == "int":
            numerator = int(value)
            if self._at_op("/"):
                self._next()
                den = self._next()
                if den[0] != "int":
                    raise ExpressionSyntaxError("expected integer denominator", den[2])
                if int(den[1]) == 0:
                    raise ExpressionSyntaxError("zero denominator", den[2])
                return Scalar(Fraction(numerator, int(den[1])))
            return Scalar(Fraction(numerator))
        if kind == "name":
            if value == "exp":
                self._expect_op("(")
                inner = self.expression()
                self._expect_op(")")
                return Exponential(inner)
            if value in self.parameters:
                return Scalar(PolyRational.variable(value))
            try:
                return Symbol(self.alphabet, self.alphabet.index(value))
            except KeyError:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", position)
        if kind == "op" and value == "(":
            inner = self.expression()
            self._expect_op(")")
            return inner
        if kind == "op" and value == "[":
            left = self.expression()
            self._expect_op(",")
            right = self.expression()
            self._expect_op("]")
            return Commutator(left, right)
        if kind == "op" and value == "-":
            return scaled(Fraction(-1), self.primary())
        raise ExpressionSyntaxError(f"unexpected token {value!r}", position)


def parse_expression(
    text: str, alphabet: GradedAlphabet, parameters: Sequence[str] = ()
) -> NCExpression:
    """Parse expression text over the given alphabet and scalar parameters."""
    return _Parser(text, alphabet, parameters).parse()


def parse_polynomial(text: str, variables: Sequence[str]) -> PolyRational:
    """Parse a purely scalar expression into a polynomial over ``variables``."""
    empty = GradedAlphabet((), ())
    expr = parse_expression(text, empty, variables)
    if not isinstance(expr, Scalar):
        raise ExpressionSyntaxError("expected a scalar-only expression", 0)
    value = expr.value
    if isinstance(value, Fraction):
        return PolyRational.constant(value, variables)
    return value.with_variables(
        tuple(variables) + tuple(v for v in value.variables if v not in variables)
    )


# -- printing ----------------------------------------------------------------


def _scalar_str(value) -> str:
    from .rings import rat_str

    if isinstance(value, Fraction):
        return rat_str(value)
    if isinstance(value, PolyRational):
        text = str(value)
        if len(value.terms) > 1:
            return f"({text})"
        return text
    return str(value)


def _scalar_is_negative(value) -> bool:
    if isinstance(value, Fraction):
        return value < 0
    if isinstance(value, PolyRational):
        ordered = value.sorted_terms()
        return bool(ordered) and ordered[0][1] < 0
    try:
        return value < 0
    except TypeError:
        return False


def print_expression(e: NCExpression) -> str:
    """Canonical text form; ``parse_expression`` inverts it."""
    return _print(e)


def _print(e: NCExpression, context: str = "sum") -> str:
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Scalar):
        return _scalar_str(e.value)
    if isinstance(e, ScalarMultiple):
        scalar, operand = e.scalar, e.operand
        if isinstance(scalar, Fraction) and scalar == -1:
            body = f"-{_print(operand, 'product')}"
        else:
            body = f"{_scalar_str(scalar)}*{_print(operand, 'product')}"
        if context in ("product", "power"):
            return f"({body})"
        return body
    if isinstance(e, Sum):
        pieces = [_print(e.terms[0], "sum")]
        for t in e.terms[1:]:
            if isinstance(t, ScalarMultiple) and _scalar_is_negative(t.scalar):
                pieces.append(f"- {_print(scaled(Fraction(-1), t), 'sum')}")
            elif isinstance(t, Scalar) and _scalar_is_negative(t.value):
                pieces.append(f"- {_print(Scalar(_scalar_mul(Fraction(-1), t.value)), 'sum')}")
            else:
                pieces.append(f"+ {_print(t, 'sum')}")
        body = " ".join(pieces)
        if context in ("product", "power"):
            return f"({body})"
        return body
    if isinstance(e, Product):
        body = "*".join(_print(f, "product") for f in e.factors)
        if context == "power":
            return f"({body})"
        return body
    if isinstance(e, IntegerPower):
        inner = _print(e.base, "power")
        if isinstance(e.base, IntegerPower):
            inner = f"({inner})"
        return f"{inner}^{e.exponent}"
    if isinstance(e, Commutator):
        return f"[{_print(e.left, 'sum')},{_print(e.right, 'sum')}]"
    if isinstance(e, Exponential):
        return f"exp({_print(e.operand, 'sum')})"
    raise TypeError(f"unknown expression node {e!r}")


def to_json_dict(e: NCExpression) -> dict:
    """Plain-dictionary form of the tree, for debugging dumps."""
    if isinstance(e, Symbol):
        return {"kind": "symbol", "name": e.name}
    if isinstance(e, Scalar):
        return {"kind": "scalar", "value": _scalar_str(e.value)}
    if isinstance(e, ScalarMultiple):
        return {
            "kind": "scalar_multiple",
            "scalar": _scalar_str(e.scalar),
            "operand": to_json_dict(e.operand),
        }
    if isinstance(e, Sum):
        return {"kind": "sum", "terms": [to_json_dict(t) for t in e.terms]}
    if isinstance(e, Product):
        return {"kind": "product", "factors": [to_json_dict(f) for f in e.factors]}
    if isinstance(e, IntegerPower):
        return {"kind": "power", "base": to_json_dict(e.base), "exponent": e.exponent}
    if isinstance(e, Commutator):
        return {
            "kind": "commutator",
            "left": to_json_dict(e.left),
            "right": to_json_dict(e.right),
        }
    if isinstance(e, Exponential):
        return {"kind": "exponential", "operand": to_json_dict(e.operand)}
    raise TypeError(f"unknown expression node {e!r}")


# -- parameter substitution ---------------------------------------------------


def substitute_parameters(e: NCExpression, assignment: Mapping[str, object]) -> NCExpression:
    """Substitute values for named scalar parameters, keeping the tree shape.

    Rational values are substituted exactly; mpmath values switch the affected
    scalars to numeric form and must then cover every remaining variable of
    each polynomial scalar they touch.
    """
    exact = {k: Fraction(v) for k, v in assignment.items() if isinstance(v, (int, Fraction))}
    numeric = {
        k: v for k, v in assignment.items() if isinstance(v, (mpmath.mpf, mpmath.mpc, float))
    }

    def map_scalar(value):
        if not isinstance(value, PolyRational):
            return value
        out = value.substitute(exact) if exact else value
        remaining = out.used_variables()
        if not remaining:
            return out.constant_value()
        if numeric:
            if all(v in numeric for v in remaining):
                return out.evaluate(numeric)
            covered = [v for v in remaining if v in numeric]
            if covered:
                raise ValueError(
                    "numeric substitution must cover all remaining variables "
                    f"of each scalar; {out} still uses {remaining}"
                )
        return out

    def walk(node: NCExpression) -> NCExpression:
        if isinstance(node, Symbol):
            return node
        if isinstance(node, Scalar):
            return Scalar(map_scalar(node.value))
        if isinstance(node, ScalarMultiple):
            return scaled(map_scalar(node.scalar), walk(node.operand))
        if isinstance(node, Sum):
            return summed([walk(t) for t in node.terms])
        if isinstance(node, Product):
            return product([walk(f) for f in node.factors])
        if isinstance(node, IntegerPower):
            return power(walk(node.base), node.exponent)
        if isinstance(node, Commutator):
            return Commutator(walk(node.left), walk(node.right))
        if isinstance(node, Exponential):
            return Exponential(walk(node.operand))
        raise TypeError(f"unknown expression node {node!r}")

    return walk(e)


# -- self-adjoint ansatz -------------------------------------------------------


@dataclass(frozen=True)
class SchemeAnsatz:
    """Parametric product of exponentials with mirrored exponent rows."""

    J: int
    generators: GradedAlphabet
    parameter_names: tuple[str, ...]
    expression: NCExpression

    @property
    def rows(self) -> int:
        return (self.J + 1) // 2


def build_self_adjoint_ansatz(
    J: int, generators: GradedAlphabet, name_prefix: str = "f"
) -> SchemeAnsatz:
    """Product of J exponentials whose exponent rows mirror with grade signs.

    Exponent j (counted from the right) uses one parameter per generator; the
    mirror exponent J-j+1 reuses row j with sign +1 on odd grades and -1 on
    even grades, so an even J leaves J/2 * K free parameters.  For odd J the
    middle exponent keeps only its odd-grade generators.
    """
    if J < 1:
        raise ValueError("need at least one exponential")
    K = len(generators)
    if tuple(generators.grades) != tuple(range(1, K + 1)):
        raise ValueError("generators must carry grades 1..K in order")
    half = (J + 1) // 2
    names: list[str] = []
    rows: list[list[PolyRational]] = []
    for j in range(1, half + 1):
        row = []
        middle = (J % 2 == 1) and (j == half)
        for k in range(1, K + 1):
            if middle and k % 2 == 0:
                row.append(PolyRational.zero())
                continue
            name = f"{name_prefix}{j}{k}"
            names.append(name)
            row.append(PolyRational.variable(name))
        rows.append(row)

    def exponent(phi_index: int) -> NCExpression:
        if phi_index <= half:
            row = rows[phi_index - 1]
            signs = [1] * K
        else:
            row = rows[J - phi_index]
            signs = [1 if k % 2 == 1 else -1 for k in range(1, K + 1)]
        terms = []
        for k in range(K):
            coeff = row[k] if signs[k] == 1 else -row[k]
            if coeff.is_zero():
                continue
            terms.append(scaled(coeff, Symbol(generators, k)))
        return summed(terms)

    factors = [Exponential(exponent(j)) for j in range(J, 0, -1)]
    return SchemeAnsatz(
        J=J,
        generators=generators,
        parameter_names=tuple(names),
        expression=product(factors),
    )


def exponent_sequence(e: NCExpression) -> list[NCExpression]:
    """Exponents of a product of exponentials, rightmost factor first."""
    if isinstance(e, Exponential):
        return [e.operand]
    if isinstance(e, Product) and all(isinstance(f, Exponential) for f in e.factors):
        return [f.operand for f in reversed(e.factors)]
    raise ShapeError("expected a product of exponentials")


def is_self_adjoint(e: NCExpression, max_grade: int) -> bool:
    """Check the mirror-sign condition on graded exponent components.

    Exponent j and exponent J-j+1 must agree on every word coefficient up to
    ``max_grade``, with sign +1 on odd grades and -1 on even grades; the word
    expansions come from the series oracle so arbitrary Lie-element exponents
    are handled.
    """
    from .oracle import series_of

    exponents = exponent_sequence(e)
    J = len(exponents)
    cache = [series_of(phi, max_grade) for phi in exponents]
    for j in range(J):
        left = cache[J - 1 - j]
        right = cache[j]
        words = set(left.coefficients) | set(right.coefficients)
        for letters in words:
            g = sum(left.alphabet.grades[i] for i in letters)
            sign = 1 if g % 2 == 1 else -1
            a = left.coefficients.get(letters, left.ring.zero())
            b = right.coefficients.get(letters, right.ring.zero())
            if sign == 1:
                if not left.ring.eq(a, b):
                    return False
            else:
                if not left.ring.eq(a, left.ring.neg(b)):
                    return False
    return True
