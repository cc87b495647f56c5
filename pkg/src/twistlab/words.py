"""Free-group words over surface generators, surface presentations, and the
index sets labeling the generating trace-coordinate curves.

Letters are nonzero signed integers: +i is the i-th generator, -i its
inverse.  Words are kept freely reduced.  The text grammar used by the CLI
and the catalog files writes a generator as a lowercase token ("a1") and its
inverse as the same token uppercased ("A1"), whitespace separated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .su2 import IDENTITY, GroupElement

__all__ = [
    "Word",
    "IndexSet",
    "SurfacePresentation",
    "UnsupportedSurface",
    "free_reduce",
    "cyclic_reduce",
    "canonical_cyclic_key",
    "concat",
    "inverse_letters",
    "evaluate",
    "surface_presentation",
    "index_sets",
    "curve_word",
    "parse_word",
    "format_word",
    "parse_letters",
    "format_letters",
]

IndexSet = tuple[int, ...]


class UnsupportedSurface(ValueError):
    """Raised for surfaces outside the supported range (need 2 - 2g - n < 0, n >= 1)."""


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Unique freely reduced form: cancel adjacent (+i, -i) pairs. Idempotent."""
    out: list[int] = []
    for l in letters:
        if l == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def inverse_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-l for l in reversed(letters))


def cyclic_reduce(letters: Sequence[int]) -> tuple[int, ...]:
    """Freely reduce, then strip cancelling first/last pairs."""
    w = list(free_reduce(letters))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def canonical_cyclic_key(letters: Sequence[int]) -> tuple[int, ...]:
    """Canonical form of a cyclic word up to rotation and inversion.

    Lexicographically least tuple over all rotations of the cyclic reduction
    and of its inverse.  Two words have equal keys iff they agree up to
    conjugation and inversion, which is exactly trace equality.
    """
    w = cyclic_reduce(letters)
    if not w:
        return ()
    best = None
    for seq in (w, inverse_letters(w)):
        for r in range(len(seq)):
            cand = seq[r:] + seq[:r]
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True, slots=True)
class Word:
    """Freely reduced word; value object."""

    letters: tuple[int, ...]

    @staticmethod
    def of(letters: Iterable[int]) -> "Word":
        return Word(free_reduce(letters))

    @staticmethod
    def empty() -> "Word":
        return Word(())

    def __mul__(self, other: "Word") -> "Word":
        return Word(free_reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(inverse_letters(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def cyclic_key(self) -> tuple[int, ...]:
        return canonical_cyclic_key(self.letters)

    def max_index(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def __str__(self) -> str:
        return format_word(self)


def concat(*ws: Word) -> Word:
    letters: tuple[int, ...] = ()
    for w in ws:
        letters += w.letters
    return Word(free_reduce(letters))


def evaluate(word: Word, values: Sequence[GroupElement]) -> GroupElement:
    """Left-to-right product of values[i-1]^(+-1) over the word's letters."""
    out = IDENTITY
    for l in word.letters:
        v = values[l - 1] if l > 0 else values[-l - 1].inverse()
        out = out * v
    return out


@dataclass(frozen=True)
class SurfacePresentation:
    """Surface of genus g with n boundary circles; fundamental group free of
    rank N = 2g + n - 1 on generators A_1..A_N.

    Boundary words: the i-th boundary, i < n, is the single generator
    A_{2g+i}; the last one is solved from the defining relation
    [A_1,A_2]...[A_{2g-1},A_{2g}] A_{2g+1} ... A_{2g+n} = 1.
    """

    genus: int
    boundary_count: int
    rank: int
    boundary_words: tuple[Word, ...]

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.boundary_count

    def key(self) -> tuple[int, int]:
        return (self.genus, self.boundary_count)


def _commutator_product(g: int) -> tuple[int, ...]:
    letters: list[int] = []
    for j in range(1, g + 1):
        a, b = 2 * j - 1, 2 * j
        letters += [a, b, -a, -b]
    return tuple(letters)


def surface_presentation(g: int, n: int) -> SurfacePresentation:
    if n < 1 or g < 0 or 2 - 2 * g - n >= 0:
        raise UnsupportedSurface(f"need n >= 1 and 2-2g-n < 0, got (g, n) = ({g}, {n})")
    rank = 2 * g + n - 1
    boundary: list[Word] = [Word((2 * g + i,)) for i in range(1, n)]
    # relation: commutators * A_{2g+1} ... A_{2g+n} = 1, solve for the last letter
    head = _commutator_product(g) + tuple(2 * g + i for i in range(1, n))
    boundary.append(Word(free_reduce(inverse_letters(head))))
    return SurfacePresentation(g, n, rank, tuple(boundary))


def relation_word(pres: SurfacePresentation) -> tuple[int, ...]:
    """The full defining relation with the derived boundary word substituted;
    freely reduces to the empty word."""
    head = _commutator_product(pres.genus) + tuple(
        2 * pres.genus + i for i in range(1, pres.boundary_count)
    )
    return free_reduce(head + pres.boundary_words[-1].letters)


def index_sets(n_generators: int) -> list[IndexSet]:
    """All ascending index tuples of size 1..3 in {1..N}, ordered by (size, lex)."""
    if n_generators < 1:
        raise ValueError("need at least one generator")
    out: list[IndexSet] = []
    for k in (1, 2, 3):
        out.extend(itertools.combinations(range(1, n_generators + 1), k))
    return out


def curve_word(index_set: Sequence[int]) -> Word:
    """Ascending product word A_{i_1} ... A_{i_k} for an index set."""
    idx = tuple(index_set)
    if not 1 <= len(idx) <= 3 or any(i <= 0 for i in idx) or list(idx) != sorted(set(idx)):
        raise ValueError(f"not a valid index set: {idx!r}")
    return Word(idx)


# ---------------------------------------------------------------------------
# text grammar: "a1 a2 A1" with lowercase = generator, uppercase = inverse


def parse_letters(text: str, symbol: str = "a", rank: int | None = None) -> tuple[int, ...]:
    letters: list[int] = []
    for tok in text.split():
        head, digits = tok[:1], tok[1:]
        if head.lower() != symbol or not digits.isdigit():
            raise ValueError(f"bad token {tok!r} (expected like '{symbol}1' or '{symbol.upper()}1')")
        i = int(digits)
        if i < 1 or (rank is not None and i > rank):
            raise ValueError(f"generator index {i} out of range in token {tok!r}")
        letters.append(i if head.islower() else -i)
    return tuple(letters)


def format_letters(letters: Sequence[int], symbol: str = "a") -> str:
    return " ".join(f"{symbol}{l}" if l > 0 else f"{symbol.upper()}{-l}" for l in letters)


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse the documented word grammar into a freely reduced Word."""
    return Word(free_reduce(parse_letters(text, "a", rank)))


def format_word(word: Word) -> str:
    return format_letters(word.letters, "a")
