"""Braid words in Artin generators on n strands.

A word is a sequence of letters sigma_i^{+-1}, stored as (index, sign) pairs
in reading order.  No free reduction or Artin-relation rewriting is performed:
words act on coordinates exactly as given.

Action order convention: the leftmost letter of a word acts first.  With this
convention the word parsed from "-3 2 -1" sends (-1,-1,0,-1) to (2,-3,-1,0)
on four strands, matching the product notation used for braid composites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import BraidFormatError

Letter = tuple[int, int]  # (generator index, sign +1/-1)


@dataclass(frozen=True)
class BraidWord:
    """An immutable word in the Artin generators of B_n."""

    strands: int
    letters: tuple[Letter, ...]

    def __post_init__(self) -> None:
        if self.strands < 3:
            raise BraidFormatError(f"need at least 3 strands, got {self.strands}")
        for idx, sign in self.letters:
            if not 1 <= idx <= self.strands - 1:
                raise BraidFormatError(
                    f"generator index {idx} out of range for {self.strands} strands"
                )
            if sign not in (1, -1):
                raise BraidFormatError(f"bad sign {sign}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return compose(self, other)

    def __pow__(self, m: int) -> "BraidWord":
        if m < 0:
            return inverse(self) ** (-m)
        return BraidWord(self.strands, self.letters * m)

    def render(self) -> str:
        """Inverse of :func:`parse_braid`: signed indices separated by spaces."""
        return " ".join(str(idx * sign) for idx, sign in self.letters)


def identity_word(strands: int) -> BraidWord:
    return BraidWord(strands, ())


def parse_braid(text: str, strands: int) -> BraidWord:
    """Parse whitespace-separated signed generator indices.

    "1 -2" on 3 strands is sigma_1 sigma_2^{-1}; the empty string is the
    identity word.  Zero tokens and out-of-range indices are rejected.
    """
    letters: list[Letter] = []
    for tok in text.split():
        try:
            k = int(tok)
        except ValueError:
            raise BraidFormatError(f"bad token {tok!r}") from None
        if k == 0:
            raise BraidFormatError("zero is not a generator index")
        letters.append((abs(k), 1 if k > 0 else -1))
    return BraidWord(strands, tuple(letters))


def compose(w1: BraidWord, w2: BraidWord) -> BraidWord:
    """Concatenation: acting by compose(w1, w2) is acting by w1, then w2."""
    if w1.strands != w2.strands:
        raise BraidFormatError(
            f"strand mismatch: {w1.strands} vs {w2.strands}"
        )
    return BraidWord(w1.strands, w1.letters + w2.letters)


def inverse(w: BraidWord) -> BraidWord:
    """Reverse the letters and negate the signs."""
    return BraidWord(
        w.strands, tuple((idx, -sign) for idx, sign in reversed(w.letters))
    )


def parse_braid_file(text: str) -> list[BraidWord]:
    """Parse a braid file: one braid per line, first token ``n=<strands>``.

    Blank lines and lines starting with ``#`` are skipped.
    """
    words = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if not head.startswith("n="):
            raise BraidFormatError(f"line {lineno}: expected 'n=<strands>' first")
        try:
            strands = int(head[2:])
        except ValueError:
            raise BraidFormatError(f"line {lineno}: bad strand count {head[2:]!r}") from None
        words.append(parse_braid(rest, strands))
    return words
