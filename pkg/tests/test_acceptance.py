"""Acceptance gate: every criterion at its stated tolerance and budget.

Each test prints one PASS line (visible with ``pytest -s`` or on failure) so
the suite doubles as a checklist.
"""

import random
import time
from fractions import Fraction

import mpmath
from mpmath import mp

from expocon import (
    GradedAlphabet,
    Word,
    leading_error_term,
    lyndon_bracketing,
    lyndon_coefficient_matrix,
    lyndon_words_of_grade,
    lyndon_words_of_odd_grade_up_to,
    magnus_alphabet,
    magnus_rhs_for_word,
    magnus_word_coefficient,
    parse_expression,
    phiv,
    positivity_check,
    residual_of_scheme,
    solve_splitting_example,
    substitute_parameters,
    wcoeff,
)
from expocon.conditions import solve_rational_system
from expocon.magnus import (
    assemble_scheme_expression,
    eighth_order_condition_sets,
    inverse_quadrature_map,
)
from expocon.ncexpr import parse_polynomial, product, scaled, summed
from expocon.oracle import series_of
from expocon.reference import (
    RHS_12,
    RHS_3,
    RHS_4,
    SPLITTING4_CB,
    SPLITTING4_CW,
    SPLITTING4_SOLUTION,
    SPLITTING4_T5,
    STRANG_COEFFS,
    STRANG_WORDS,
    load_complex_table,
    load_real_table,
    load_reference_parameters,
)
from expocon.solver import (
    build_magnus8_stage1,
    build_splitting4_system,
    magnus8_stage1_variables,
    multistart_search,
    staged_solve_magnus8,
)

from conftest import AB, RANDOM_ALPHABETS, random_expression, words_up_to_grade


def report(number, label, elapsed, budget):
    print(f"PASS criterion {number}: {label} ({elapsed:.2f}s, budget {budget}s)")
    assert elapsed < budget, f"criterion {number} exceeded its {budget}s budget"


def test_criterion_1_strang_reproduction():
    start = time.monotonic()
    X = parse_expression("exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)", AB)
    got = [wcoeff(Word.parse(AB, text), X) for text in STRANG_WORDS]
    assert got == STRANG_COEFFS
    term = leading_error_term(X, 3)
    assert term.grade == 3
    assert [(str(b), c) for c, b in term.terms()] == [
        ("[A,[A,B]]", Fraction(1, 12)),
        ("[[A,B],B]", Fraction(-1, 24)),
    ]
    report(1, "14 word coefficients and grade-3 error term", time.monotonic() - start, 1.0)


def test_criterion_2_fourth_order_splitting_reproduction():
    start = time.monotonic()
    S, E, system = build_splitting4_system()
    expected = [
        "-1+2*a",
        "-1+2*b+c",
        "-1/6+2*a^2*b+1/2*a^2*c",
        "-1/6+1/2*a*c^2+a*c*b+a*b^2-d",
    ]
    for got, text in zip(system.condition_polynomials(), expected):
        assert got == parse_polynomial(text, ("a", "b", "c", "d"))
    solution = solve_splitting_example()
    assert solution == SPLITTING4_SOLUTION
    X = substitute_parameters(S, solution) - E
    words5, _, t5 = lyndon_coefficient_matrix(AB, 5)
    assert [[int(x) for x in row] for row in t5] == SPLITTING4_T5
    assert [wcoeff(w, X) for w in words5] == SPLITTING4_CW
    term = leading_error_term(X, 5)
    assert term.grade == 5 and term.coefficients == SPLITTING4_CB
    report(2, "equations, solution, T5, c_w, c_b all exact", time.monotonic() - start, 10.0)


def test_criterion_3_closed_form_flow_coefficients():
    start = time.monotonic()
    (w12, r12), (w3, r3), (w4, r4) = eighth_order_condition_sets()
    assert r12 == RHS_12 and r3 == RHS_3 and r4 == RHS_4
    for ws, rs in [(w12, r12), (w3, r3), (w4, r4)]:
        assert [magnus_rhs_for_word(w) for w in ws] == rs
    a8 = magnus_alphabet(8)
    high = 0
    for w in words_up_to_grade(a8, 8):
        if w.is_identity():
            continue
        degrees = [a8.grades[i] for i in w.letters]
        if any(d >= 5 for d in degrees):
            assert magnus_word_coefficient(degrees) == 0
            high += 1
    assert high == 32
    report(3, "22 closed-form targets plus exhaustive vanishing", time.monotonic() - start, 5.0)


def test_criterion_4_lyndon_machinery():
    start = time.monotonic()
    table_ab = {
        1: ["A", "B"], 2: ["AB"], 3: ["AAB", "ABB"],
        4: ["AAAB", "AABB", "ABBB"],
        5: ["AAAAB", "AAABB", "AABAB", "AABBB", "ABABB", "ABBBB"],
    }
    brackets_ab = {
        3: ["[A,[A,B]]", "[[A,B],B]"],
        5: [
            "[A,[A,[A,[A,B]]]]", "[A,[A,[[A,B],B]]]", "[[A,[A,B]],[A,B]]",
            "[A,[[[A,B],B],B]]", "[[A,B],[[A,B],B]]", "[[[[A,B],B],B],B]",
        ],
    }
    for q, texts in table_ab.items():
        got = lyndon_words_of_grade(AB, q)
        assert [str(w) for w in got] == texts
        if q in brackets_ab:
            assert [str(lyndon_bracketing(w)) for w in got] == brackets_ab[q]
    a4 = magnus_alphabet(4)
    table_a4 = {
        1: ["A1"], 2: ["A2"], 3: ["A1 A2", "A3"],
        4: ["A1 A1 A2", "A1 A3", "A4"],
        5: ["A1 A1 A1 A2", "A1 A1 A3", "A1 A2 A2", "A1 A4", "A2 A3"],
    }
    brackets_a4 = {
        4: ["[A1,[A1,A2]]", "[A1,A3]", "A4"],
        5: ["[A1,[A1,[A1,A2]]]", "[A1,[A1,A3]]", "[[A1,A2],A2]", "[A1,A4]", "[A2,A3]"],
    }
    for q, texts in table_a4.items():
        got = lyndon_words_of_grade(a4, q)
        assert [str(w) for w in got] == texts
        if q in brackets_a4:
            assert [str(lyndon_bracketing(w)) for w in got] == brackets_a4[q]
    all22 = lyndon_words_of_odd_grade_up_to(a4, 8)
    assert len(all22) == 22
    (w12, _), (w3, _), (w4, _) = eighth_order_condition_sets(a4)
    assert [len(w12), len(w3), len(w4)] == [8, 9, 5]
    report(4, "published word tables, bracketings, 22 = 8+9+5", time.monotonic() - start, 5.0)


def _verify_table(kind, digits=64):
    alphabet = magnus_alphabet(4)
    rows = load_real_table(digits) if kind == "real" else load_complex_table(digits)
    f = inverse_quadrature_map(rows, digits=digits)
    expr = assemble_scheme_expression(f, alphabet)
    groups = eighth_order_condition_sets(alphabet)
    words = [w for ws, _ in groups for w in ws]
    rhs = [r for _, rs in groups for r in rs]
    residual = residual_of_scheme(expr, words, rhs, digits)
    return f, residual


def test_criterion_5_table_verification():
    start = time.monotonic()
    digits = 64
    f_real, res_real = _verify_table("real", digits)
    assert res_real <= mpmath.mpf("1e-16")
    published = load_reference_parameters(digits)
    with mp.workdps(digits + 10):
        worst = max(
            abs(f_real.rows[j - 1][k - 1] - published[f"f{j}{k}"])
            for j in range(1, 5)
            for k in range(1, 5)
        )
    assert worst <= mpmath.mpf("1e-16")
    f_cplx, res_cplx = _verify_table("complex", digits)
    assert res_cplx <= mpmath.mpf("1e-16")
    positivity = positivity_check(f_cplx)
    assert positivity.passed and len(positivity.per_row) == 8
    report(
        5,
        "both tables verified at 64 digits, positivity for the complex one",
        time.monotonic() - start,
        120.0,
    )


def test_criterion_6_oracle_equivalence():
    start = time.monotonic()
    rng = random.Random(20260809)
    checked = 0
    for trial in range(100):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        expr, _ = random_expression(rng, alphabet, 3)
        series = series_of(expr, 6, alphabet=alphabet)
        for w in words_up_to_grade(alphabet, 6):
            assert wcoeff(w, expr) == series.coeff(w), (trial, str(w))
            checked += 1
    assert checked > 10000
    report(
        6,
        f"engine equals oracle on 100 expressions ({checked} word checks)",
        time.monotonic() - start,
        300.0,
    )


def test_criterion_7_theorem_level_properties():
    start = time.monotonic()
    rng = random.Random(31415)
    # multiplicativity and linearity of the subword-coefficient transform
    for trial in range(40):
        alphabet = RANDOM_ALPHABETS[trial % len(RANDOM_ALPHABETS)]
        X, _ = random_expression(rng, alphabet, 2)
        Y, _ = random_expression(rng, alphabet, 2)
        w = Word(alphabet, tuple(rng.randrange(len(alphabet)) for _ in range(rng.randint(0, 6))))
        v = [Fraction(rng.randint(-3, 3)) for _ in range(len(w) + 1)]
        assert phiv(w, product([X, Y]), v) == phiv(w, X, phiv(w, Y, v))
        alpha = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        beta = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        assert wcoeff(w, summed([scaled(alpha, X), scaled(beta, Y)])) == alpha * wcoeff(
            w, X
        ) + beta * wcoeff(w, Y)
    # completeness: the solved scheme kills every word of grade <= 4
    S, E, _ = build_splitting4_system()
    X = substitute_parameters(S, solve_splitting_example()) - E
    series = series_of(X, 4)
    for w in words_up_to_grade(AB, 4):
        assert series.coeff(w) == 0
    # odd-grade reduction: even-grade Lyndon coefficients vanish
    strang = parse_expression("exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)", AB)
    for w in lyndon_words_of_grade(AB, 2):
        assert wcoeff(w, strang) == 0
    for q in (2, 4):
        for w in lyndon_words_of_grade(AB, q):
            assert wcoeff(w, X) == 0
    report(7, "homomorphism laws, completeness, odd-grade reduction", time.monotonic() - start, 300.0)


def test_criterion_8_solver_pipeline():
    start = time.monotonic()
    _, system = build_magnus8_stage1()
    report_obj = multistart_search(system, n_starts=2000, digits=50, seed=0)
    threshold = mpmath.mpf("1e-40")
    good = [s for s in report_obj.solutions if s.residual < threshold]
    assert len(good) >= 5, f"only {len(good)} stage-1 solutions below 1e-40"
    for solution in good:
        staged = staged_solve_magnus8(solution.assignment, digits=50)
        assert staged.residual < threshold, mpmath.nstr(staged.residual, 5)
    report(
        8,
        f"{len(good)} distinct stage-1 solutions, each completing to all 22 conditions",
        time.monotonic() - start,
        900.0,
    )
