"""Lyndon machinery: enumeration by grade, bracketing, published word tables."""

import pytest

from expocon import (
    GradedAlphabet,
    InvalidWordError,
    Word,
    grade_of,
    is_lyndon,
    lyndon_bracketing,
    lyndon_words_of_grade,
    lyndon_words_of_odd_grade_up_to,
)
from expocon.magnus import magnus_alphabet

AB = GradedAlphabet(("A", "B"), (1, 1))
A4 = magnus_alphabet(4)


def words(alphabet, texts):
    return [Word.parse(alphabet, t) for t in texts]


def test_grade_of_examples():
    assert grade_of(Word.parse(AB, "AAB")) == 3
    assert grade_of(Word.parse(A4, "A1 A2")) == 3
    assert grade_of(Word.identity(AB)) == 0


def test_uniform_alphabet_word_table():
    expected = {
        1: ["A", "B"],
        2: ["AB"],
        3: ["AAB", "ABB"],
        4: ["AAAB", "AABB", "ABBB"],
        5: ["AAAAB", "AAABB", "AABAB", "AABBB", "ABABB", "ABBBB"],
    }
    for q, texts in expected.items():
        assert lyndon_words_of_grade(AB, q) == words(AB, texts)


def test_uniform_alphabet_counts():
    assert [len(lyndon_words_of_grade(AB, q)) for q in range(1, 6)] == [2, 1, 2, 3, 6]


def test_graded_alphabet_word_table():
    expected = {
        1: ["A1"],
        2: ["A2"],
        3: ["A1 A2", "A3"],
        4: ["A1 A1 A2", "A1 A3", "A4"],
        5: ["A1 A1 A1 A2", "A1 A1 A3", "A1 A2 A2", "A1 A4", "A2 A3"],
    }
    for q, texts in expected.items():
        assert lyndon_words_of_grade(A4, q) == words(A4, texts)


def test_grade_one_returns_single_letters():
    got = lyndon_words_of_grade(A4, 1)
    assert got == [Word(A4, (0,))]
    assert lyndon_words_of_grade(AB, 1) == [Word(AB, (0,)), Word(AB, (1,))]


def test_lyndon_words_are_smaller_than_rotations():
    for alphabet, max_grade in [(AB, 8), (A4, 8)]:
        for q in range(1, max_grade + 1):
            for w in lyndon_words_of_grade(alphabet, q):
                assert is_lyndon(w)
                seq = w.letters
                for k in range(1, len(seq)):
                    assert seq < seq[k:] + seq[:k]


def test_odd_grade_lists():
    got = lyndon_words_of_odd_grade_up_to(AB, 4)
    assert got == words(AB, ["A", "B", "AAB", "ABB"])
    assert lyndon_words_of_odd_grade_up_to(AB, 1) == words(AB, ["A", "B"])

    all22 = lyndon_words_of_odd_grade_up_to(A4, 8)
    assert len(all22) == 22


def test_partition_of_the_22_words():
    from expocon.magnus import eighth_order_condition_sets

    (w12, _), (w3, _), (w4, _) = eighth_order_condition_sets(A4)
    assert [len(w12), len(w3), len(w4)] == [8, 9, 5]
    assert w12 == words(
        A4,
        [
            "A1", "A1 A2", "A1 A1 A1 A2", "A1 A2 A2",
            "A1 A1 A1 A1 A1 A2", "A1 A1 A1 A2 A2", "A1 A1 A2 A1 A2", "A1 A2 A2 A2",
        ],
    )
    assert w3 == words(
        A4,
        [
            "A3", "A1 A1 A3", "A2 A3", "A1 A1 A1 A1 A3", "A1 A1 A2 A3",
            "A1 A1 A3 A2", "A1 A2 A1 A3", "A1 A3 A3", "A2 A2 A3",
        ],
    )
    assert w4 == words(A4, ["A1 A4", "A1 A1 A1 A4", "A1 A2 A4", "A1 A4 A2", "A3 A4"])


def test_bracketing_examples():
    assert str(lyndon_bracketing(Word.parse(AB, "AAB"))) == "[A,[A,B]]"
    assert str(lyndon_bracketing(Word.parse(AB, "ABB"))) == "[[A,B],B]"
    assert str(lyndon_bracketing(Word.parse(A4, "A1 A1 A2"))) == "[A1,[A1,A2]]"
    assert str(lyndon_bracketing(Word.parse(AB, "B"))) == "B"


def test_bracketing_tables():
    expected_ab = {
        2: ["[A,B]"],
        3: ["[A,[A,B]]", "[[A,B],B]"],
        4: ["[A,[A,[A,B]]]", "[A,[[A,B],B]]", "[[[A,B],B],B]"],
        5: [
            "[A,[A,[A,[A,B]]]]", "[A,[A,[[A,B],B]]]", "[[A,[A,B]],[A,B]]",
            "[A,[[[A,B],B],B]]", "[[A,B],[[A,B],B]]", "[[[[A,B],B],B],B]",
        ],
    }
    for q, texts in expected_ab.items():
        got = [str(lyndon_bracketing(w)) for w in lyndon_words_of_grade(AB, q)]
        assert got == texts
    expected_a4 = {
        3: ["[A1,A2]", "A3"],
        4: ["[A1,[A1,A2]]", "[A1,A3]", "A4"],
        5: ["[A1,[A1,[A1,A2]]]", "[A1,[A1,A3]]", "[[A1,A2],A2]", "[A1,A4]", "[A2,A3]"],
    }
    for q, texts in expected_a4.items():
        got = [str(lyndon_bracketing(w)) for w in lyndon_words_of_grade(A4, q)]
        assert got == texts


def test_bracketing_rejects_non_lyndon_words():
    with pytest.raises(InvalidWordError):
        lyndon_bracketing(Word.parse(AB, "BA"))
    with pytest.raises(InvalidWordError):
        lyndon_bracketing(Word.parse(AB, "ABAB"))


def test_bracketing_foliage_and_unit_coefficient():
    from expocon.conditions import lyndon_coefficient_matrix

    for alphabet, grades in [(AB, range(1, 7)), (A4, range(1, 9))]:
        for q in grades:
            ws, basis, matrix = lyndon_coefficient_matrix(alphabet, q)
            for i, (w, b) in enumerate(zip(ws, basis)):
                assert b.foliage() == w
                assert matrix[i][i] == 1


def test_alphabet_validation():
    with pytest.raises(ValueError):
        GradedAlphabet(("A", "A"), (1, 1))
    with pytest.raises(ValueError):
        GradedAlphabet(("A",), (0,))
    spec = GradedAlphabet.from_spec("A:1, B:2")
    assert spec.names == ("A", "B") and spec.grades == (1, 2)


def test_word_parsing_and_printing():
    w = Word.parse(A4, "A1 A2")
    assert str(w) == "A1 A2"
    assert str(Word.parse(AB, "AAB")) == "AAB"
    assert Word.parse(AB, "Id").is_identity()
    with pytest.raises(KeyError):
        Word.parse(AB, "A C")
