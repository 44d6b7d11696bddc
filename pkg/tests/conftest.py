"""Shared fixtures and the seeded random-expression generator."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from expocon import GradedAlphabet, Word
from expocon.ncexpr import (
    Symbol,
    commutator,
    exponential,
    power,
    product,
    scaled,
    summed,
)

AB = GradedAlphabet(("A", "B"), (1, 1))

RANDOM_ALPHABETS = [
    GradedAlphabet(("A", "B"), (1, 1)),
    GradedAlphabet(("A", "B"), (1, 2)),
    GradedAlphabet(("A", "B", "C"), (1, 1, 2)),
    GradedAlphabet(("A", "B", "C"), (1, 2, 3)),
    GradedAlphabet(("A1", "A2", "A3", "A4"), (1, 2, 3, 4)),
]


@pytest.fixture
def ab():
    return AB


def random_expression(rng: random.Random, alphabet: GradedAlphabet, depth: int):
    """Random expression tree; the flag reports a zero identity coefficient.

    Exponentials are only wrapped around constant-free subexpressions so the
    result is always valid input for both coefficient engines.
    """
    if depth == 0 or rng.random() < 0.25:
        return Symbol(alphabet, rng.randrange(len(alphabet))), True
    kind = rng.choice(["sum", "prod", "smul", "pow", "comm", "exp"])
    if kind == "sum":
        parts = [random_expression(rng, alphabet, depth - 1) for _ in range(rng.randint(2, 3))]
        return summed([p for p, _ in parts]), all(c for _, c in parts)
    if kind == "prod":
        parts = [random_expression(rng, alphabet, depth - 1) for _ in range(rng.randint(2, 3))]
        return product([p for p, _ in parts]), all(c for _, c in parts)
    if kind == "smul":
        e, c = random_expression(rng, alphabet, depth - 1)
        return scaled(Fraction(rng.randint(-6, 6), rng.randint(1, 6)), e), c
    if kind == "pow":
        e, c = random_expression(rng, alphabet, depth - 1)
        return power(e, rng.randint(1, 3)), c
    if kind == "comm":
        a, _ = random_expression(rng, alphabet, depth - 1)
        b, _ = random_expression(rng, alphabet, depth - 1)
        return commutator(a, b), True
    e, c = random_expression(rng, alphabet, depth - 1)
    if not c:
        return e, c
    return exponential(e), False


def words_up_to_grade(alphabet: GradedAlphabet, max_grade: int) -> list[Word]:
    """Every word of grade <= max_grade, identity included."""
    out = [()]

    def extend(prefix, grade):
        for i in range(len(alphabet)):
            g = grade + alphabet.grades[i]
            if g <= max_grade:
                out.append(tuple(prefix + [i]))
                extend(prefix + [i], g)

    extend([], 0)
    return [Word(alphabet, letters) for letters in out]
