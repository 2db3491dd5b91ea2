"""Free-group words as tuples of letter codes.

A free group of rank R uses codes 0..2R-1: generator i is code 2*i, its
inverse is 2*i+1, so ``d ^ 1`` inverts a letter. Words are tuples of codes,
always kept freely reduced by the functions here. The code order gives the
letter order used everywhere (x < x^-1 < y < y^-1 < ...), and shortlex on
that order is the canonical word order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetMismatch, ShapeError

Word = tuple  # tuple[int, ...]

_TOKEN_RE = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)(\^-1|\^\-?\d+)?")


@dataclass(frozen=True)
class Alphabet:
    """Named generators of a free group.

    Text form of a word: whitespace-separated tokens, one per letter, each
    either a generator name or ``name^-1``; the empty word is spelled ``1``.
    ``parse`` additionally accepts power tokens like ``x^3`` or ``y^-2`` as
    input shorthand, but ``format`` never emits them.
    """

    names: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.names or len(set(self.names)) != len(self.names):
            raise ShapeError("alphabet needs distinct nonempty generator names")
        for nm in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm) or nm == "1":
                raise ShapeError(f"bad generator name: {nm!r}")
        object.__setattr__(self, "_index", {nm: i for i, nm in enumerate(self.names)})

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def letters(self) -> range:
        return range(2 * len(self.names))

    def code(self, name: str, inverse: bool = False) -> int:
        try:
            i = self._index[name]
        except KeyError:
            raise ShapeError(f"unknown generator {name!r}") from None
        return 2 * i + (1 if inverse else 0)

    def letter_name(self, d: int) -> str:
        i, inv = divmod(d, 2)
        if not 0 <= i < len(self.names):
            raise ShapeError(f"letter code {d} out of range")
        return self.names[i] + ("^-1" if inv else "")

    def check(self, word: Sequence[int]) -> None:
        for d in word:
            if not 0 <= d < 2 * len(self.names):
                raise AlphabetMismatch(f"letter code {d} not in rank-{self.rank} alphabet")

    def parse(self, text: str) -> Word:
        """Parse ``x y^-1 x`` (also accepts powers like ``x^3``) to a reduced word."""
        out = []
        for piece in text.split():
            if piece == "1":
                continue
            m = _TOKEN_RE.fullmatch(piece)
            if not m:
                raise ShapeError(f"cannot parse token {piece!r}")
            name, pw = m.group(1), m.group(2)
            exp = int(pw[1:]) if pw else 1
            d = self.code(name, inverse=exp < 0)
            out.extend([d] * abs(exp))
        return reduce_word(tuple(out))

    def parse_tuple(self, texts: Iterable[str]) -> tuple:
        return tuple(self.parse(t) for t in texts)

    def format(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        self.check(word)
        return " ".join(self.letter_name(d) for d in word)


def alphabet(rank: int, names: Sequence[str] = ()) -> Alphabet:
    if names:
        return Alphabet(tuple(names))
    defaults = ("x", "y", "z", "u", "v", "w")
    if rank <= len(defaults):
        return Alphabet(defaults[:rank])
    return Alphabet(tuple(f"g{i}" for i in range(rank)))


def reduce_word(word: Sequence[int]) -> Word:
    out = []
    for d in word:
        if out and out[-1] == d ^ 1:
            out.pop()
        else:
            out.append(d)
    return tuple(out)


def inv(word: Sequence[int]) -> Word:
    return tuple(d ^ 1 for d in reversed(word))


def mul(*words: Sequence[int]) -> Word:
    # pairwise cancellation without flattening everything first
    out = []
    for w in words:
        for d in w:
            if out and out[-1] == d ^ 1:
                out.pop()
            else:
                out.append(d)
    return tuple(out)


def conj(u: Sequence[int], g: Sequence[int]) -> Word:
    """g^-1 * u * g."""
    return mul(inv(g), u, g)


def commutator(u: Sequence[int], v: Sequence[int]) -> Word:
    return mul(inv(u), inv(v), u, v)


def word_key(word: Sequence[int]) -> tuple:
    """Shortlex key; letter order is the code order."""
    return (len(word), tuple(word))


def cyclic_rotations(word: Sequence[int]) -> Iterator[Word]:
    w = tuple(word)
    for k in range(max(1, len(w))):
        yield w[k:] + w[:k]


def cyclically_reduce(word: Sequence[int]) -> Word:
    w = reduce_word(word)
    while len(w) >= 2 and w[0] == w[-1] ^ 1:
        w = w[1:-1]
    return w


def iter_reduced_words(rank: int, max_len: int) -> Iterator[Word]:
    """All freely reduced words of length <= max_len, shortlex order."""
    yield ()
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            last = w[-1] if w else -2
            for d in range(2 * rank):
                if d == last ^ 1:
                    continue
                nw = w + (d,)
                nxt.append(nw)
                yield nw
        frontier = nxt


def reduced_words(rank: int, max_len: int) -> list:
    return list(iter_reduced_words(rank, max_len))


def random_reduced_word(rng, rank: int, length: int) -> Word:
    out = []
    for _ in range(length):
        choices = [d for d in range(2 * rank) if not out or d != out[-1] ^ 1]
        out.append(rng.choice(choices))
    return tuple(out)


# --- Nielsen reduction ----------------------------------------------------

def _half_key(w: Word) -> tuple:
    # order words so that a left half "as small as possible" wins ties;
    # comparing the sorted pair of half-prefixes of w and w^-1 makes the
    # greedy loop terminate (see _nielsen_key) and is inversion-invariant
    h = (len(w) + 1) // 2
    return tuple(sorted((w[:h], inv(w)[:h])))


def _nielsen_key(ws) -> tuple:
    # basis size first: a dedupe step may leave a lexicographically larger
    # tail, and on equal sizes the sorted key tuple orders replacements
    keys = tuple(sorted((len(w), _half_key(w)) for w in ws))
    return (len(keys), keys)


def nielsen_reduce(words: Iterable[Word]) -> list:
    """Nielsen-reduced basis of the subgroup generated by ``words``.

    Greedy: repeatedly replace a generator by a shorter (then
    lexicographically better) product with another generator or its inverse.
    The multiset of (length, half-prefix) keys strictly decreases on every
    step, so this terminates; the final set is checked against the Nielsen
    conditions outright.
    """
    basis = []
    for w in words:
        w = reduce_word(w)
        if w:
            basis.append(min(w, inv(w), key=word_key))
    basis = sorted(set(basis), key=word_key)

    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(len(basis)):
                if i == j:
                    continue
                wi, wj = basis[i], basis[j]
                for cand in (mul(wi, wj), mul(wi, inv(wj)),
                             mul(wj, wi), mul(inv(wj), wi)):
                    trial = list(basis)
                    trial[i] = cand
                    trial = [min(w, inv(w), key=word_key)
                             for w in trial if reduce_word(w)]
                    trial = sorted(set(trial), key=word_key)
                    if _nielsen_key(trial) < _nielsen_key(basis):
                        basis = trial
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break

    _assert_nielsen(basis)
    return basis


def _assert_nielsen(basis: list) -> None:
    """Lyndon-Schupp N0-N2 for the symmetrized set basis u basis^-1."""
    sym = [w for b in basis for w in (b, inv(b))]
    for w in sym:
        if not w:
            raise ShapeError("identity in Nielsen basis")
    for a, b in itertools.product(sym, repeat=2):
        if mul(a, b) == ():
            continue
        # N1: no more than half of either factor cancels
        if len(mul(a, b)) < max(len(a), len(b)):
            raise ShapeError(f"Nielsen N1 fails for {a} {b}")
    for a, b, c in itertools.product(sym, repeat=3):
        if mul(a, b) == () or mul(b, c) == ():
            continue
        # N2: the middle factor is never swallowed
        if len(mul(a, b, c)) <= len(a) - len(b) + len(c):
            raise ShapeError(f"Nielsen N2 fails for {a} {b} {c}")
