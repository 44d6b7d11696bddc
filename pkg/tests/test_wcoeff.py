"""The word-coefficient engine against published values and the series oracle."""

import random
from fractions import Fraction

import pytest

from expocon import (
    GradedAlphabet,
    NonzeroConstantTermError,
    ShapeError,
    Word,
    constant_term,
    infer_ring,
    parse_expression,
    phiv,
    wcoeff,
)
from expocon.ncexpr import parse_polynomial
from expocon.oracle import series_of
from expocon.poly import PolyRing
from expocon.reference import STRANG_COEFFS, STRANG_WORDS

from conftest import AB, RANDOM_ALPHABETS, random_expression, words_up_to_grade


def strang():
    return parse_expression("exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)", AB)


def test_phiv_single_symbol():
    w = Word.parse(AB, "A")
    out = phiv(w, parse_expression("A", AB), [Fraction(0), Fraction(1)])
    assert out == [Fraction(1), Fraction(0)]


def test_phiv_strang_first_entry():
    w = Word.parse(AB, "AAB")
    out = phiv(w, strang(), [Fraction(0)] * 3 + [Fraction(1)])
    assert out[0] == Fraction(1, 12)


def test_phiv_vector_length_check():
    w = Word.parse(AB, "AB")
    with pytest.raises(ShapeError):
        phiv(w, strang(), [Fraction(0), Fraction(1)])


def test_wcoeff_product_of_exponentials():
    e = parse_expression("exp(A)*exp(B)", AB)
    w = Word.parse(AB, "AB")
    assert wcoeff(w, e) == 1
    assert series_of(e, 2).coeff(w) == 1
    assert wcoeff(Word.parse(AB, "BA"), e) == 0


def test_wcoeff_exponential_of_sum():
    assert wcoeff(Word.parse(AB, "AB"), parse_expression("exp(A+B)", AB)) == Fraction(1, 2)


def test_strang_fourteen_coefficients():
    X = strang()
    got = [wcoeff(Word.parse(AB, text), X) for text in STRANG_WORDS]
    assert got == STRANG_COEFFS


def test_identity_word_coefficient():
    X = parse_expression("exp(A) - exp(B)", AB)
    assert wcoeff(Word.identity(AB), X) == 0
    assert wcoeff(Word.identity(AB), parse_expression("exp(A+B)", AB)) == 1


def test_splitting_conditions_as_polynomials():
    X = parse_expression(
        "exp(b*B)*exp(a*A)*exp(c*B + d*[B,[A,B]])*exp(a*A)*exp(b*B) - exp(A+B)",
        AB,
        ("a", "b", "c", "d"),
    )
    variables = ("a", "b", "c", "d")
    expected = [
        "-1+2*a",
        "-1+2*b+c",
        "-1/6+2*a^2*b+1/2*a^2*c",
        "-1/6+1/2*a*c^2+a*c*b+a*b^2-d",
    ]
    for text, expect in zip(["A", "B", "AAB", "ABB"], expected):
        got = wcoeff(Word.parse(AB, text), X)
        assert got == parse_polynomial(expect, variables)


def test_exponential_requires_zero_constant_term():
    bad = parse_expression("exp(exp(A))", AB)
    with pytest.raises(NonzeroConstantTermError):
        wcoeff(Word.parse(AB, "A"), bad)
    with pytest.raises(NonzeroConstantTermError):
        constant_term(bad)
    # also enforced when the offending exponential is reached with nonzero vector
    bad2 = parse_expression("A*exp(1/2 + B)", AB)
    with pytest.raises(NonzeroConstantTermError):
        wcoeff(Word.parse(AB, "AB"), bad2)


def test_constant_term_examples():
    assert constant_term(parse_expression("exp(A+B)", AB)) == 1
    assert constant_term(parse_expression("A*B", AB)) == 0
    assert constant_term(parse_expression("[A,B]", AB)) == 0
    assert constant_term(parse_expression("3/4", AB)) == Fraction(3, 4)


def test_homomorphism_product_law():
    rng = random.Random(77)
    for trial in range(60):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        X, _ = random_expression(rng, alphabet, 2)
        Y, _ = random_expression(rng, alphabet, 2)
        length = rng.randint(0, 6)
        w = Word(alphabet, tuple(rng.randrange(len(alphabet)) for _ in range(length)))
        v = [Fraction(rng.randint(-3, 3)) for _ in range(len(w) + 1)]
        from expocon.ncexpr import product

        left = phiv(w, product([X, Y]), v)
        right = phiv(w, X, phiv(w, Y, v))
        assert left == right, (w, trial)


def test_homomorphism_linearity():
    rng = random.Random(78)
    for trial in range(60):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        X, _ = random_expression(rng, alphabet, 2)
        Y, _ = random_expression(rng, alphabet, 2)
        alpha = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        beta = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
        length = rng.randint(0, 6)
        w = Word(alphabet, tuple(rng.randrange(len(alphabet)) for _ in range(length)))
        from expocon.ncexpr import scaled, summed

        combined = wcoeff(w, summed([scaled(alpha, X), scaled(beta, Y)]))
        assert combined == alpha * wcoeff(w, X) + beta * wcoeff(w, Y)


def test_exponential_truncation_matches_oracle_exp():
    rng = random.Random(79)
    for trial in range(30):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        Y, constant_free = random_expression(rng, alphabet, 2)
        if not constant_free:
            continue
        from expocon.ncexpr import exponential

        E = exponential(Y)
        series = series_of(E, 5, alphabet=alphabet)
        for w in words_up_to_grade(alphabet, 5):
            assert wcoeff(w, E) == series.coeff(w)


def test_early_exit_soundness():
    rng = random.Random(80)
    for trial in range(40):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        X, _ = random_expression(rng, alphabet, 3)
        length = rng.randint(0, 5)
        w = Word(alphabet, tuple(rng.randrange(len(alphabet)) for _ in range(length)))
        assert wcoeff(w, X, early_exit=True) == wcoeff(w, X, early_exit=False)


def test_ring_inference():
    X = parse_expression("a*A", AB, ("a",))
    ring = infer_ring(X)
    assert isinstance(ring, PolyRing)
    assert ring.variables == ("a",)
    import mpmath

    from expocon.ncexpr import Symbol, scaled

    mixed = scaled(mpmath.mpf("0.5"), Symbol(AB, 0)) + scaled(
        parse_polynomial("a", ("a",)), Symbol(AB, 1)
    )
    with pytest.raises(TypeError):
        infer_ring(mixed)
