"""Words are tuples of symbols; plain strings are split into characters."""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetError

Word = tuple


def as_word(w, sep: str | None = None) -> Word:
    if isinstance(w, str):
        if sep is not None:
            return tuple(s for s in w.split(sep) if s) if w else ()
        return tuple(w)
    return tuple(w)


def check_word(w: Word, alphabet: Iterable[str]) -> None:
    allowed = set(alphabet)
    for s in w:
        if s not in allowed:
            raise AlphabetError(f"symbol {s!r} is not in the alphabet {sorted(allowed)}")


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length 0..max_len, shortest first, in lexicographic order."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def words_of_length(alphabet: Sequence[str], n: int) -> Iterator[Word]:
    return itertools.product(alphabet, repeat=n)


def fmt(w: Word) -> str:
    if all(len(s) == 1 for s in w):
        return "".join(w) or "ε"
    return " ".join(w) or "ε"
