"""Words over a doubled alphabet: free reduction, Dyck tests, rotations, splits.

Generators are single lowercase ASCII letters.  The compact text syntax
writes a generator's formal inverse as the matching uppercase letter and the
empty word as ``1``; whitespace is ignored, so ``abAB`` parses as
a b a' b'.  Words are plain tuples of :class:`Letter`, immutable and
hashable, and every operation here is a pure function.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterator, NamedTuple


class Letter(NamedTuple):
    """A signed generator: ``sign`` is +1 for x and -1 for its formal inverse."""

    gen: int
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.sign)


Word = tuple[Letter, ...]

EMPTY_WORD: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator names; indices into ``names`` are fixed for life."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("alphabet needs at least one generator")
        for name in self.names:
            if len(name) != 1 or name not in string.ascii_lowercase:
                raise ValueError(
                    f"generator must be a single lowercase ASCII letter, got {name!r}"
                )
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be pairwise distinct")

    @classmethod
    def of(cls, text: str) -> "Alphabet":
        """Build from a string of generator names, ignoring whitespace."""
        return cls(tuple(ch for ch in text if not ch.isspace()))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValueError(f"unknown generator {name!r}") from None

    def letter(self, name: str, sign: int = 1) -> Letter:
        return Letter(self.index(name), sign)

    def signed_letters(self) -> list[Letter]:
        """All 2k letters in canonical order (per generator, +1 before -1)."""
        out = []
        for gen in range(len(self.names)):
            out.append(Letter(gen, 1))
            out.append(Letter(gen, -1))
        return out

    def char(self, letter: Letter) -> str:
        name = self.names[letter.gen]
        return name if letter.sign > 0 else name.upper()


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse the compact syntax (lowercase/uppercase letters, ``1`` = empty)."""
    letters = []
    for ch in text:
        if ch.isspace() or ch == "1":
            continue
        if ch in string.ascii_lowercase:
            letters.append(alphabet.letter(ch, 1))
        elif ch in string.ascii_uppercase:
            letters.append(alphabet.letter(ch.lower(), -1))
        else:
            raise ValueError(f"unknown generator {ch!r}")
    return tuple(letters)


def format_word(word: Word, alphabet: Alphabet) -> str:
    if not word:
        return "1"
    return "".join(alphabet.char(l) for l in word)


def invert(word: Word) -> Word:
    """Reverse the letters and flip every sign."""
    return tuple(l.inverse() for l in reversed(word))


def reduce(word: Word) -> Word:
    """Unique free reduction, by a single left-to-right stack pass."""
    stack: list[Letter] = []
    for l in word:
        if stack and stack[-1] == l.inverse():
            stack.pop()
        else:
            stack.append(l)
    return tuple(stack)


def is_reduced(word: Word) -> bool:
    return all(word[i + 1] != word[i].inverse() for i in range(len(word) - 1))


def is_dyck(word: Word) -> bool:
    """True iff the word freely reduces to the empty word."""
    return not reduce(word)


def is_cyclically_reduced(word: Word) -> bool:
    if not is_reduced(word):
        return False
    return not word or word[0] != word[-1].inverse()


def cyclic_conjugates(word: Word) -> list[Word]:
    """The rotations of ``word`` in rotation order, duplicates removed."""
    if not word:
        return [EMPTY_WORD]
    seen = set()
    out = []
    for i in range(len(word)):
        rot = word[i:] + word[:i]
        if rot not in seen:
            seen.add(rot)
            out.append(rot)
    return out


def splits(word: Word) -> list[tuple[Word, Word]]:
    """All factorizations ``word = u v`` with u, v non-empty, by prefix length."""
    if len(word) < 2:
        raise ValueError("no nonempty split")
    return [(word[:i], word[i:]) for i in range(1, len(word))]


def letter_sort_key(letter: Letter) -> tuple[int, int]:
    return (letter.gen, 0 if letter.sign > 0 else 1)


def word_sort_key(word: Word) -> tuple[tuple[int, int], ...]:
    """Key for the lexicographic order used by deterministic listings."""
    return tuple(letter_sort_key(l) for l in word)
