"""Exact arithmetic on freely and cyclically reduced words over a rank-N alphabet.

Letters are nonzero ints: ``i`` stands for the i-th generator, ``-i`` for its
inverse.  Words are tuples of letters with no adjacent cancelling pair; the
empty tuple is the identity.  Text form uses ``a..z`` for generators and
``A..Z`` for inverses ("abAB" = a b a^-1 b^-1), capping the rank at 26.

A conjugacy class is represented by :class:`CyclicWord`: a cyclically reduced
word stored in its lexicographically least rotation under the letter order
a < a^-1 < b < b^-1 < ...  Two cyclic words are conjugate iff their canonical
forms are equal.  Classes quotient by rotation only, never by inversion:
[w] and [w^-1] are distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_RANK = 26

Letter = int
Word = tuple  # freely reduced tuple of letters


@dataclass(frozen=True)
class Alphabet:
    """A free basis a_1..a_N; the signed letter set has 2N elements."""

    rank: int

    def __post_init__(self):
        if not 2 <= self.rank <= MAX_RANK:
            raise ValueError(f"rank must be in [2, {MAX_RANK}], got {self.rank}")

    def letters(self) -> tuple:
        """All 2N signed letters in canonical order a, a^-1, b, b^-1, ..."""
        out = []
        for i in range(1, self.rank + 1):
            out.append(i)
            out.append(-i)
        return tuple(out)

    def parse(self, text: str) -> Word:
        w = parse_word(text)
        bad = [x for x in w if abs(x) > self.rank]
        if bad:
            raise ValueError(f"letter {format_word((bad[0],))!r} outside rank-{self.rank} alphabet")
        return w

    def format(self, letters: Sequence[int]) -> str:
        return format_word(letters)


def parse_word(text: str) -> Word:
    """Parse "abAB" into (1, 2, -1, -2).  Does not freely reduce."""
    out = []
    for ch in text:
        if "a" <= ch <= "z":
            out.append(ord(ch) - ord("a") + 1)
        elif "A" <= ch <= "Z":
            out.append(-(ord(ch) - ord("A") + 1))
        else:
            raise ValueError(f"bad letter {ch!r} in word {text!r}")
    return tuple(out)


def format_word(letters: Sequence[int]) -> str:
    out = []
    for x in letters:
        if x == 0 or abs(x) > MAX_RANK:
            raise ValueError(f"letter {x} not representable")
        out.append(chr(ord("a") + x - 1) if x > 0 else chr(ord("A") - x - 1))
    return "".join(out)


def free_reduce(raw: Iterable[int]) -> Word:
    """The unique freely reduced word equal to the input in F_N.

    Linear-time stack cancellation; idempotent and length-non-increasing.
    """
    out = []
    push = out.append
    pop = out.pop
    for x in raw:
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return tuple(out)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def is_freely_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    if not is_freely_reduced(w):
        return False
    return len(w) < 2 or w[0] != -w[-1]


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Split a freely reduced word as w = g * c * g^-1 with c cyclically reduced.

    Returns (c, g); c is the unrotated core so that reassembly is exact.
    An empty core signals w = 1 (then g is the vanished half).
    """
    if not is_freely_reduced(w):
        raise ValueError("input must be freely reduced")
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return tuple(w[i:j]), tuple(w[:i])


def _rotation_keys(letters: Sequence[int]) -> list:
    # letter order a < a^-1 < b < b^-1 < ...
    return [2 * x if x > 0 else 1 - 2 * x for x in letters]


def least_rotation_index(letters: Sequence[int]) -> int:
    """Index of the least rotation (Booth-style duel scan, O(n))."""
    keys = _rotation_keys(letters)
    n = len(keys)
    if n <= 1:
        return 0
    i, j, k = 0, 1, 0
    while i < n and j < n and k < n:
        a = keys[(i + k) % n]
        b = keys[(j + k) % n]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    return min(i, j)


def canonical_rotation(letters: Sequence[int]) -> Word:
    """Least rotation of a cyclically reduced word; conjugate words agree here."""
    if not letters:
        raise ValueError("empty word has no canonical rotation")
    if not is_cyclically_reduced(letters):
        raise ValueError("input must be cyclically reduced")
    r = least_rotation_index(letters)
    return tuple(letters[r:]) + tuple(letters[:r])


class CyclicWord(tuple):
    """Canonical representative of a conjugacy class of a nontrivial element.

    Subclasses tuple: hashable, ordered, iterable as its letters.  The stored
    rotation is always the canonical (least) one.
    """

    __slots__ = ()

    def __new__(cls, letters, _canonical: bool = False):
        letters = tuple(letters)
        if not letters:
            raise ValueError("cyclic word must be nonempty")
        if not _canonical:
            letters = canonical_rotation(letters)
        return tuple.__new__(cls, letters)

    def __repr__(self):
        return f"CyclicWord({format_word(self)!r})"

    def __str__(self):
        return format_word(self)

    @property
    def length(self) -> int:
        return len(self)

    def inverse_class(self) -> "CyclicWord":
        return CyclicWord(invert_word(self))


def conjugacy_class(w) -> CyclicWord:
    """Full pipeline word -> class: free reduce, cyclically reduce, canonicalize.

    Accepts a letter sequence or a text word.  Raises on the trivial element.
    """
    if isinstance(w, str):
        w = parse_word(w)
    reduced = free_reduce(w)
    core, _ = cyclic_reduce(reduced)
    if not core:
        raise ValueError("trivial element has no conjugacy class representative")
    return CyclicWord(core)


def occurrences_cyclic(v: Sequence[int], w: Sequence[int]) -> int:
    """Occurrences of v read forwards in the cyclic word w (over len(w) starts).

    v is read in w^infinity, so it may be longer than w.
    """
    if not v:
        raise ValueError("pattern must be nonempty")
    n = len(w)
    if n == 0:
        return 0
    m = len(v)
    count = 0
    for start in range(n):
        for off in range(m):
            if w[(start + off) % n] != v[off]:
                break
        else:
            count += 1
    return count


def occurrences_symmetrized(v: Sequence[int], w: Sequence[int]) -> int:
    """Occurrences of v in w reading forwards or backwards.

    A nonempty reduced v never equals its own inverse, so nothing is counted
    twice.
    """
    return occurrences_cyclic(v, w) + occurrences_cyclic(invert_word(v), w)


def enumerate_reduced_words(rank: int, length: int) -> list:
    """All freely reduced words of exactly the given length, in letter order."""
    alphabet = Alphabet(rank).letters()
    if length == 0:
        return [()]
    out = [(x,) for x in alphabet]
    for _ in range(length - 1):
        out = [w + (x,) for w in out for x in alphabet if x != -w[-1]]
    return out


def enumerate_cyclic_classes(rank: int, length: int) -> list:
    """All canonical cyclic words of exactly the given cyclic length."""
    seen = set()
    out = []
    for w in enumerate_reduced_words(rank, length):
        if length >= 2 and w[0] == -w[-1]:
            continue
        c = CyclicWord(w)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out
