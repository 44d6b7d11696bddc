"""Graded alphabets, words, Lyndon word enumeration and Lyndon bracketing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class InvalidWordError(ValueError):
    """Raised when an operation requires a Lyndon word and gets something else."""


@dataclass(frozen=True)
class GradedAlphabet:
    """Ordered noncommutative symbols, each with a positive integer grade."""

    names: tuple[str, ...]
    grades: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.grades):
            raise ValueError("names and grades must have equal length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate symbol names in {self.names}")
        if any(g < 1 for g in self.grades):
            raise ValueError("grades must be positive integers")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "GradedAlphabet":
        names, grades = zip(*pairs)
        return cls(tuple(names), tuple(int(g) for g in grades))

    @classmethod
    def from_spec(cls, text: str) -> "GradedAlphabet":
        """Parse "A:1,B:1" style alphabet descriptions."""
        pairs = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, _, grade = chunk.partition(":")
            if not grade:
                raise ValueError(f"missing grade in alphabet entry {chunk!r}")
            pairs.append((name.strip(), int(grade)))
        if not pairs:
            raise ValueError("empty alphabet specification")
        return cls.from_pairs(pairs)

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown symbol {name!r} (alphabet: {', '.join(self.names)})")

    def word(self, text: str) -> "Word":
        return Word.parse(self, text)


@dataclass(frozen=True)
class Word:
    """A finite product of alphabet symbols; the empty word is the identity."""

    alphabet: GradedAlphabet
    letters: tuple[int, ...]

    def __post_init__(self):
        n = len(self.alphabet)
        if any(not (0 <= i < n) for i in self.letters):
            raise ValueError(f"letter index out of range in {self.letters}")

    @classmethod
    def identity(cls, alphabet: GradedAlphabet) -> "Word":
        return cls(alphabet, ())

    @classmethod
    def parse(cls, alphabet: GradedAlphabet, text: str) -> "Word":
        """Read a word from symbol names, whitespace-separated or concatenated.

        Concatenated input is only unambiguous for single-character names;
        multi-character alphabets must separate names with spaces.
        """
        text = text.strip()
        if not text or text == "Id":
            return cls.identity(alphabet)
        if any(ch.isspace() for ch in text):
            return cls(alphabet, tuple(alphabet.index(p) for p in text.split()))
        if all(len(name) == 1 for name in alphabet.names):
            return cls(alphabet, tuple(alphabet.index(ch) for ch in text))
        return cls(alphabet, (alphabet.index(text),))

    def __len__(self):
        return len(self.letters)

    @property
    def grade(self) -> int:
        return sum(self.alphabet.grades[i] for i in self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def names(self) -> tuple[str, ...]:
        return tuple(self.alphabet.names[i] for i in self.letters)

    def __str__(self):
        if not self.letters:
            return "Id"
        sep = "" if all(len(n) == 1 for n in self.alphabet.names) else " "
        return sep.join(self.names())

    def __repr__(self):
        return f"Word({self})"


def grade_of(w: Word) -> int:
    return w.grade


def is_lyndon(w: Word) -> bool:
    """A word is Lyndon iff it is strictly smaller than all proper rotations."""
    seq = w.letters
    n = len(seq)
    if n == 0:
        return False
    return all(seq < seq[k:] + seq[:k] for k in range(1, n))


def _duval(n_symbols: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """All Lyndon index tuples of length <= max_len, in lexicographic order."""
    if n_symbols < 1 or max_len < 1:
        return
    w = [0]
    while True:
        yield tuple(w)
        m = len(w)
        w = [w[i % m] for i in range(max_len)]
        while w and w[-1] == n_symbols - 1:
            w.pop()
        if not w:
            return
        w[-1] += 1


def lyndon_words_of_grade(alphabet: GradedAlphabet, q: int) -> list[Word]:
    """Lyndon words of total grade q, in lexicographic order.

    Generation runs by length (every grade-q word has length <= q / min grade)
    and filters on the grade; Duval's order is already lexicographic.
    """
    if q < 1:
        raise ValueError("grade must be >= 1")
    max_len = q // min(alphabet.grades)
    out = []
    if max_len < 1:
        return out
    grades = alphabet.grades
    for letters in _duval(len(alphabet), max_len):
        if sum(grades[i] for i in letters) == q:
            out.append(Word(alphabet, letters))
    return out


def lyndon_words_of_odd_grade_up_to(alphabet: GradedAlphabet, p: int) -> list[Word]:
    """Concatenation of the grade-q Lyndon lists for q = 1, 3, 5, ... <= p."""
    if p < 1:
        raise ValueError("maximal grade must be >= 1")
    out: list[Word] = []
    for q in range(1, p + 1, 2):
        out.extend(lyndon_words_of_grade(alphabet, q))
    return out


@dataclass(frozen=True)
class BasisElement:
    """A letter or a nested commutator of two basis elements."""

    alphabet: GradedAlphabet
    letter: int | None = None
    left: "BasisElement | None" = None
    right: "BasisElement | None" = None

    def __post_init__(self):
        if (self.letter is None) == (self.left is None or self.right is None):
            raise ValueError("a basis element is either a letter or a bracket")

    def is_letter(self) -> bool:
        return self.letter is not None

    @property
    def grade(self) -> int:
        if self.letter is not None:
            return self.alphabet.grades[self.letter]
        return self.left.grade + self.right.grade

    def foliage(self) -> Word:
        """The word read off the leaves from left to right."""
        if self.letter is not None:
            return Word(self.alphabet, (self.letter,))
        left = self.left.foliage().letters
        right = self.right.foliage().letters
        return Word(self.alphabet, left + right)

    def __str__(self):
        if self.letter is not None:
            return self.alphabet.names[self.letter]
        return f"[{self.left},{self.right}]"

    def __repr__(self):
        return f"BasisElement({self})"


def lyndon_bracketing(w: Word) -> BasisElement:
    """Standard factorization of a Lyndon word into nested commutators.

    The split point takes the longest proper suffix that is itself Lyndon;
    single letters map to themselves.
    """
    if not is_lyndon(w):
        raise InvalidWordError(f"{w} is not a Lyndon word")
    if len(w) == 1:
        return BasisElement(w.alphabet, letter=w.letters[0])
    for split in range(1, len(w)):
        suffix = Word(w.alphabet, w.letters[split:])
        if is_lyndon(suffix):
            prefix = Word(w.alphabet, w.letters[:split])
            return BasisElement(
                w.alphabet,
                left=lyndon_bracketing(prefix),
                right=lyndon_bracketing(suffix),
            )
    raise InvalidWordError(f"no standard factorization for {w}")  # unreachable
