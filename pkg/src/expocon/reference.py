"""Bundled reference values: scheme tables and golden outputs for `repro`."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import mpmath
from mpmath import mp

from .rings import GUARD_DIGITS


def _load(name: str) -> dict:
    path = resources.files("expocon.data").joinpath(name)
    return json.loads(path.read_text())


def load_real_table(digits: int = 64) -> list[list]:
    """Per-node rows of the bundled real 8th-order scheme, as mpf."""
    doc = _load("table_real.json")
    with mp.workdps(digits + GUARD_DIGITS):
        return [[mpmath.mpf(x) for x in row] for row in doc["rows"]]


def load_complex_table(digits: int = 64) -> list[list]:
    """Per-node rows of the bundled complex 8th-order scheme, as mpc."""
    doc = _load("table_complex.json")
    with mp.workdps(digits + GUARD_DIGITS):
        return [
            [
                mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
                for re, im in zip(row_re, row_im)
            ]
            for row_re, row_im in zip(doc["rows_real"], doc["rows_imag"])
        ]


def load_reference_parameters(digits: int = 64) -> dict[str, mpmath.mpf]:
    """The 16 published 50-digit exponent coefficients of the real scheme."""
    doc = _load("reference_parameters.json")
    with mp.workdps(digits + GUARD_DIGITS):
        return {name: mpmath.mpf(text) for name, text in doc["f"].items()}


# Golden outputs for the reproduction commands. ``repro strang`` must emit the
# 14 word coefficients (words of length <= 3 over A, B in length-then-lex
# order) and the two grade-3 error coefficients; ``repro splitting4`` the
# solved parameters, the grade-5 basis-change matrix and both grade-5
# coefficient lists.

STRANG_WORDS = [
    "A", "B", "AA", "AB", "BA", "BB",
    "AAA", "AAB", "ABA", "ABB", "BAA", "BAB", "BBA", "BBB",
]

STRANG_COEFFS = [
    Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(0), Fraction(0),
    Fraction(0), Fraction(1, 12), Fraction(-1, 6), Fraction(-1, 24),
    Fraction(1, 12), Fraction(1, 12), Fraction(-1, 24), Fraction(0),
]

STRANG_ERROR_GRADE = 3
STRANG_ERROR_TERMS = [
    ("[A,[A,B]]", Fraction(1, 12)),
    ("[[A,B],B]", Fraction(-1, 24)),
]

SPLITTING4_SOLUTION = {
    "a": Fraction(1, 2),
    "b": Fraction(1, 6),
    "c": Fraction(2, 3),
    "d": Fraction(1, 72),
}

SPLITTING4_T5 = [
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, -2, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, -3, 1, 0],
    [0, 0, 0, 0, 0, 1],
]

SPLITTING4_CW = [
    Fraction(1, 2880), Fraction(-7, 8640), Fraction(1, 480),
    Fraction(7, 12960), Fraction(-1, 720), Fraction(-41, 155520),
]

SPLITTING4_CB = [
    Fraction(1, 2880), Fraction(-7, 8640), Fraction(1, 2160),
    Fraction(7, 12960), Fraction(1, 4320), Fraction(-41, 155520),
]

# The 22 closed-form target coefficients for the 8th-order construction, in
# the (grade, lex) order of the three word groups.

RHS_12 = [
    Fraction(1), Fraction(-1, 6), Fraction(-1, 40), Fraction(1, 60),
    Fraction(-1, 1008), Fraction(1, 420), Fraction(1, 2520), Fraction(-1, 840),
]

RHS_3 = [
    Fraction(0), Fraction(1, 60), Fraction(-1, 30), Fraction(1, 420),
    Fraction(-1, 168), Fraction(1, 280), Fraction(-1, 840), Fraction(1, 420),
    Fraction(-1, 210),
]

RHS_4 = [
    Fraction(0), Fraction(-1, 840), Fraction(1, 210), Fraction(-1, 140),
    Fraction(-1, 70),
]
