"""Whitehead automorphisms of F_N: representation, enumeration, application.

A first-kind move is a signed permutation of the basis (it permutes the 2N
letters and commutes with inversion); it preserves cyclic length on every
conjugacy class.  A second-kind move fixes a multiplier letter ``a`` and sends
every other letter x to one of x, xa, a^-1 x, a^-1 x a, encoded by a per-pair
tag on the positive representative; the image of x^-1 is forced to be the
inverse of the image of x.  The all-CONJ move with multiplier a is the inner
automorphism x -> a^-1 x a and acts trivially on conjugacy classes; such moves
are kept in the enumeration but flagged ``is_inner``.

Moves are stored as full letter-image tables for O(1) per-letter application.
`MoveSet.image_lengths` evaluates ||tau(w)|| for every move in one pass per
multiplier, without materializing the images; it is the workhorse behind the
linear-time minimality checks.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

from .words import (
    Alphabet,
    CyclicWord,
    Word,
    cyclic_reduce,
    format_word,
    free_reduce,
)

KEEP = "keep"
RIGHT = "right"
LEFT = "left"
CONJ = "conj"
TAGS = (KEEP, RIGHT, LEFT, CONJ)


class WhiteheadMove:
    """One Whitehead automorphism, with its full letter-image table."""

    __slots__ = ("kind", "multiplier", "tags", "is_inner", "table", "index", "rank")

    def __init__(self, kind, rank, table, multiplier=None, tags=None, is_inner=False):
        self.kind = kind          # 1 or 2
        self.rank = rank
        self.table = table        # dict letter -> image tuple, all 2N letters
        self.multiplier = multiplier
        self.tags = tags
        self.is_inner = is_inner
        self.index = None         # position in the owning MoveSet

    def signature(self) -> tuple:
        return tuple(self.table[x] for x in Alphabet(self.rank).letters())

    def apply_to_word(self, w) -> Word:
        """Substitute letter images, then freely reduce."""
        table = self.table
        out = []
        push = out.append
        pop = out.pop
        for x in w:
            for y in table[x]:
                if out and out[-1] == -y:
                    pop()
                else:
                    push(y)
        return tuple(out)

    def apply_to_class(self, c) -> CyclicWord:
        """Image conjugacy class; independent of the chosen representative."""
        core, _ = cyclic_reduce(self.apply_to_word(tuple(c)))
        if not core:
            raise ValueError("automorphism produced the trivial class from a nontrivial one")
        return CyclicWord(core)

    def __repr__(self):
        imgs = ", ".join(f"{format_word((i,))}->{format_word(self.table[i])}" for i in range(1, self.rank + 1))
        return f"<WhiteheadMove kind={self.kind} {imgs}>"

    def to_record(self) -> dict:
        """Wire format {kind, multiplier?, images} used in witness JSON."""
        rec = {
            "kind": "first" if self.kind == 1 else "second",
            "images": [format_word(self.table[i]) for i in range(1, self.rank + 1)],
        }
        if self.multiplier is not None:
            rec["multiplier"] = format_word((self.multiplier,))
        return rec


def _first_kind_moves(rank):
    for perm in permutations(range(1, rank + 1)):
        for signs in product((1, -1), repeat=rank):
            if all(perm[i] == i + 1 for i in range(rank)) and all(s == 1 for s in signs):
                continue  # identity
            table = {}
            for i in range(rank):
                img = signs[i] * perm[i]
                table[i + 1] = (img,)
                table[-(i + 1)] = (-img,)
            yield WhiteheadMove(1, rank, table)


def _second_kind_table(rank, a, others, tags):
    table = {a: (a,), -a: (-a,)}
    for x, tag in zip(others, tags):
        if tag == KEEP:
            table[x] = (x,)
            table[-x] = (-x,)
        elif tag == RIGHT:
            table[x] = (x, a)
            table[-x] = (-a, -x)
        elif tag == LEFT:
            table[x] = (-a, x)
            table[-x] = (-x, a)
        else:  # CONJ
            table[x] = (-a, x, a)
            table[-x] = (-a, -x, a)
    return table


def _second_kind_moves(rank):
    for a in Alphabet(rank).letters():
        others = [i for i in range(1, rank + 1) if i != abs(a)]
        for tags in product(TAGS, repeat=len(others)):
            if all(t == KEEP for t in tags):
                continue  # identity parameterization
            table = _second_kind_table(rank, a, others, tags)
            yield WhiteheadMove(2, rank, table, multiplier=a, tags=tags,
                                is_inner=all(t == CONJ for t in tags))


class MoveSet:
    """All Whitehead moves of F_N in a fixed, documented enumeration order.

    First-kind moves come first, in (permutation, sign-vector) lexicographic
    order; then second-kind moves by multiplier (a, a^-1, b, b^-1, ...) and
    tag vector.  The identity map is excluded and no two entries induce the
    same map on letters (distinct parameterizations never collide, but a
    dedup pass enforces it).  The set is closed under inversion.
    """

    def __init__(self, rank: int):
        self.rank = rank
        self.moves: list[WhiteheadMove] = []
        seen = {}
        for move in list(_first_kind_moves(rank)) + list(_second_kind_moves(rank)):
            sig = move.signature()
            if sig in seen:
                continue
            move.index = len(self.moves)
            seen[sig] = move.index
            self.moves.append(move)
        self._sig_index = seen
        self.inverse = [self._inverse_index(m) for m in self.moves]
        self.first_kind = tuple(m.index for m in self.moves if m.kind == 1)
        self.second_kind = tuple(m.index for m in self.moves if m.kind == 2)
        self.inner = tuple(m.index for m in self.moves if m.is_inner)
        self.second_kind_non_inner = tuple(
            m.index for m in self.moves if m.kind == 2 and not m.is_inner)
        self._by_multiplier = {}
        for m in self.moves:
            if m.kind == 2 and not m.is_inner:
                self._by_multiplier.setdefault(m.multiplier, []).append(m)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __getitem__(self, i) -> WhiteheadMove:
        return self.moves[i]

    def _inverse_index(self, move) -> int:
        if move.kind == 1:
            inv_table = {}
            for i in range(1, self.rank + 1):
                img = move.table[i][0]
                inv_table[img] = (i,)
                inv_table[-img] = (-i,)
            sig = tuple(inv_table[x] for x in Alphabet(self.rank).letters())
        else:
            others = [i for i in range(1, self.rank + 1) if i != abs(move.multiplier)]
            table = _second_kind_table(self.rank, -move.multiplier, others, move.tags)
            sig = tuple(table[x] for x in Alphabet(self.rank).letters())
        return self._sig_index[sig]

    def find(self, table: dict) -> WhiteheadMove:
        """Look up the move inducing the given (partial, positive-letter) map."""
        full = {}
        for i in range(1, self.rank + 1):
            img = tuple(table.get(i, (i,)))
            full[i] = img
            full[-i] = tuple(-x for x in reversed(img))
        sig = tuple(full[x] for x in Alphabet(self.rank).letters())
        if sig not in self._sig_index:
            raise KeyError("no Whitehead move induces that letter map")
        return self.moves[self._sig_index[sig]]

    # -- fast cyclic-length evaluation ------------------------------------

    def image_lengths(self, letters) -> list[int]:
        """||tau(w)|| for every move tau, for the cyclic word w = letters.

        First-kind and inner moves preserve length.  For a second-kind move
        with multiplier a, write w cyclically as c_1 a^{m_1} c_2 a^{m_2} ...
        with c_j not in {a, a^-1}; since tau(x) = a^{-l(x)} x a^{r(x)} with
        l(x^-1) = r(x), the image is c_1 a^{e_1} c_2 a^{e_2} ... with
        e_j = m_j + r(c_j) - l(c_{j+1}), and that expression is already
        cyclically reduced.  Hence ||tau(w)|| = p + sum |e_j| where p is the
        count of non-multiplier letters.  Junction tallies per ordered pair
        (c, c') make every move with the same multiplier O(alphabet^2).
        """
        n = len(letters)
        out = [n] * len(self.moves)
        if n == 0:
            return out
        for a, move_group in self._by_multiplier.items():
            stats = self._junction_stats(letters, a)
            if stats is None:
                continue  # w is a power of the multiplier: every image has length n
            p, cnt_zero, cnt_pos, sum_pos, cnt_neg, sum_neg = stats
            for move in move_group:
                total = p
                tags = move.tags
                others = [i for i in range(1, self.rank + 1) if i != abs(a)]
                right = {}
                left = {}
                for x, tag in zip(others, tags):
                    r = 1 if tag in (RIGHT, CONJ) else 0
                    l = 1 if tag in (LEFT, CONJ) else 0
                    right[x] = r
                    left[x] = l
                    right[-x] = l
                    left[-x] = r
                for key, cz in cnt_zero.items():
                    d = right[key[0]] - left[key[1]]
                    if d:
                        total += cz
                for key, cp in cnt_pos.items():
                    d = right[key[0]] - left[key[1]]
                    total += sum_pos[key] + d * cp
                for key, cn in cnt_neg.items():
                    d = right[key[0]] - left[key[1]]
                    total += sum_neg[key] - d * cn
                out[move.index] = total
        return out

    def _junction_stats(self, letters, a):
        """Tallies of (c_j, c_{j+1}, a-run) junction patterns for multiplier a."""
        n = len(letters)
        na = -a
        start = -1
        for i, x in enumerate(letters):
            if x != a and x != na:
                start = i
                break
        if start < 0:
            return None
        cnt_zero = {}
        cnt_pos = {}
        sum_pos = {}
        cnt_neg = {}
        sum_neg = {}
        p = 0
        prev_c = letters[start]
        run = 0
        first_c = prev_c
        i = start + 1
        for _ in range(n - 1):
            x = letters[i % n]
            i += 1
            if x == a:
                run += 1
            elif x == na:
                run -= 1
            else:
                p += 1
                key = (prev_c, x)
                if run == 0:
                    cnt_zero[key] = cnt_zero.get(key, 0) + 1
                elif run > 0:
                    cnt_pos[key] = cnt_pos.get(key, 0) + 1
                    sum_pos[key] = sum_pos.get(key, 0) + run
                else:
                    cnt_neg[key] = cnt_neg.get(key, 0) + 1
                    sum_neg[key] = sum_neg.get(key, 0) - run
                prev_c = x
                run = 0
        # wrap-around junction back to the first non-multiplier letter
        p += 1
        key = (prev_c, first_c)
        if run == 0:
            cnt_zero[key] = cnt_zero.get(key, 0) + 1
        elif run > 0:
            cnt_pos[key] = cnt_pos.get(key, 0) + 1
            sum_pos[key] = sum_pos.get(key, 0) + run
        else:
            cnt_neg[key] = cnt_neg.get(key, 0) + 1
            sum_neg[key] = sum_neg.get(key, 0) - run
        return p, cnt_zero, cnt_pos, sum_pos, cnt_neg, sum_neg


@lru_cache(maxsize=None)
def get_move_set(rank: int) -> MoveSet:
    """The shared, immutable move set for a given rank."""
    return MoveSet(rank)


def invert(moves: MoveSet, move: WhiteheadMove) -> WhiteheadMove:
    """The move undoing `move` (as a map on classes for the second kind)."""
    return moves[moves.inverse[move.index]]
