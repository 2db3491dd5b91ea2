"""Mod-p filtration of free groups via truncated power series.

A word maps into the free associative F_p-algebra on noncommuting
variables by sending each generator to 1 + X and each inverse to the
truncated geometric series.  The n-th filtration subgroup collects the
words whose image is 1 up to degree n, and the quotients by these
subgroups are finite p-groups, which makes three things computable at a
fixed truncation level:

* membership (``zassenhaus_member``),
* certified lower bounds on the length of nontrivial members
  (``certify_min_length`` / ``find_m``), by hashing the truncated series
  of every short word and checking for collisions, and
* free generating sets of the subgroup itself (``omega_generators``) via
  Schreier's method on the finite coset graph, with deterministic tuple
  enumeration on top (``enumerate_tuples``, ``power_tuple_stream``).

The per-degree digests used by the collision scan are deterministic
functions of the truncated series, so equal series always collide and a
clean scan is an exact certificate; candidate pairs are re-verified by
direct membership before they are ever reported as witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from . import kernels
from .errors import BudgetExceeded, InvariantViolation, NotFound, ShapeError
from .freewords import (
    Word,
    inv,
    iter_reduced_words,
    mul,
    reduce_word,
    word_key,
)


def check_prime(p: int) -> int:
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ShapeError(f"{p} is not prime")
    return p


def _word_rank(word: Word, rank: Optional[int]) -> int:
    need = max((d >> 1 for d in word), default=0) + 1
    if rank is None:
        return need
    if rank < need:
        raise ShapeError(f"word uses letter beyond rank {rank}")
    return rank


def _bytes_word(b: bytes) -> Word:
    return tuple(b)


# --- truncated series --------------------------------------------------------

@dataclass(frozen=True)
class TruncSeries:
    """A truncated element of the free F_p-algebra on ``rank`` variables.

    ``terms`` holds (packed monomial, coefficient) pairs sorted by key,
    coefficients nonzero mod p, monomial degrees below ``degree_bound``.
    The packing is positional: sentinel digit 1 followed by one base
    ``rank + 1`` digit per variable occurrence.
    """

    rank: int
    degree_bound: int
    p: int
    terms: tuple

    def is_one(self) -> bool:
        return self.terms == kernels.series_one()

    def mul(self, other: "TruncSeries") -> "TruncSeries":
        if (self.rank, self.degree_bound, self.p) != (
                other.rank, other.degree_bound, other.p):
            raise ShapeError("series parameters differ")
        impl = kernels.series_impl(self.rank, self.degree_bound)
        terms = impl.series_mul(self.terms, other.terms,
                                self.rank, self.degree_bound, self.p)
        return TruncSeries(self.rank, self.degree_bound, self.p, terms)

    def truncate(self, new_bound: int) -> "TruncSeries":
        if new_bound > self.degree_bound:
            raise ShapeError("cannot raise a truncation bound")
        impl = kernels.series_impl(self.rank, self.degree_bound)
        return TruncSeries(self.rank, new_bound, self.p,
                           impl.series_truncate(self.terms, self.rank, new_bound))

    def monomials(self) -> list:
        """Terms as (variable index tuple, coefficient), for display."""
        out = []
        for key, coeff in self.terms:
            digits = []
            k = key
            while k > 1:
                k, r = divmod(k, self.rank + 1)
                digits.append(r - 1)
            out.append((tuple(reversed(digits)), coeff))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.monomials():
            body = "*".join(f"X{i + 1}" for i in mono) if mono else "1"
            parts.append(body if coeff == 1 else f"{coeff}*{body}")
        return " + ".join(parts)


def magnus(word: Word, n: int, p: int, rank: Optional[int] = None) -> TruncSeries:
    """Image of a word under generator -> 1 + X, truncated below degree n."""
    if n < 1:
        raise ShapeError("truncation bound must be at least 1")
    check_prime(p)
    rank = _word_rank(word, rank)
    impl = kernels.series_impl(rank, n)
    return TruncSeries(rank, n, p, impl.word_series(word, rank, n, p))


def zassenhaus_member(word: Word, n: int, p: int) -> bool:
    """Whether every term of (the series of the word) - 1 has degree >= n."""
    return magnus(word, n, p).is_one()


# --- certified length bounds -------------------------------------------------

@dataclass(frozen=True)
class FiltrationIndexCert:
    """Exhaustive certificate: after scanning the truncated series of all
    ``checked_count`` reduced words of length <= ``radius``, no two agree,
    so no nontrivial word of length <= 2 * radius (in particular none
    shorter than 2 * radius) lies in the level-``m`` subgroup."""

    n: int
    p: int
    m: int
    radius: int
    checked_count: int

    passed = True

    def to_json(self) -> dict:
        return {"kind": "filtration-index", "n": self.n, "p": self.p,
                "m": self.m, "radius": self.radius,
                "checkedCount": self.checked_count}


@dataclass(frozen=True)
class FiltrationFailure:
    """A verified nontrivial member of the level-``m`` subgroup with length
    at most 2 * radius, disproving the candidate level."""

    n: int
    p: int
    m: int
    radius: int
    witness: Word

    passed = False

    def to_json(self, alphabet=None) -> dict:
        word = (alphabet.format(self.witness) if alphabet is not None
                else list(self.witness))
        return {"kind": "filtration-index", "n": self.n, "p": self.p,
                "m": self.m, "radius": self.radius, "witness": word}


def _exact_scan(rank: int, radius: int, m: int, p: int):
    """Collision scan keyed by exact truncated series; slow fallback used
    when every digest candidate fails verification (a digest accident)."""
    impl = kernels.series_impl(rank, m)
    seen: dict = {}

    def visit(word, series, last):
        key = tuple(series)
        if key in seen:
            return seen[key], bytes(word)
        seen[key] = bytes(word)
        if len(word) < radius:
            for d in range(2 * rank):
                if d == last ^ 1:
                    continue
                word.append(d)
                nxt = impl.series_mul_letter(series, d >> 1, d & 1, rank, m, p)
                hit = visit(word, nxt, d)
                word.pop()
                if hit is not None:
                    return hit
        return None

    hit = visit(bytearray(), kernels.series_one(), -1)
    return len(seen), hit


def _verify_pair(a: bytes, b: bytes, m: int, p: int, rank: int) -> Optional[Word]:
    w = reduce_word(mul(_bytes_word(a), inv(_bytes_word(b))))
    if w and zassenhaus_member(w, m, p):
        return min(w, inv(w), key=word_key)
    return None


def certify_min_length(m: int, n: int, p: int, rank: int = 3,
                       max_pairs: int = 64):
    """Scan all reduced words of length <= 6n for level-``m`` collisions.

    Two distinct words of length <= 6n with equal degree-< m series give a
    nontrivial member of length <= 12n; finding none proves no such member
    exists.  Returns FiltrationIndexCert on a clean scan, FiltrationFailure
    with a verified witness otherwise.
    """
    if m < 1:
        raise ShapeError("level must be at least 1")
    check_prime(p)
    radius = 6 * n
    impl = kernels.series_impl(rank, m)
    count, pairs = impl.collision_scan(rank, radius, [m], p, max_pairs)
    cands = pairs[m]
    for a, b in cands:
        witness = _verify_pair(a, b, m, p, rank)
        if witness is not None:
            return FiltrationFailure(n, p, m, radius, witness)
    if len(cands) >= max_pairs:
        raise BudgetExceeded(
            f"{len(cands)} digest collisions at level {m}, none verified; "
            "raise max_pairs")
    if cands:
        # Every digest candidate was an accident; redo this level exactly.
        count, hit = _exact_scan(rank, radius, m, p)
        if hit is not None:
            witness = _verify_pair(hit[1], hit[0], m, p, rank)
            if witness is None:
                raise InvariantViolation("exact scan produced a bad collision")
            return FiltrationFailure(n, p, m, radius, witness)
    return FiltrationIndexCert(n, p, m, radius, count)


@dataclass(frozen=True)
class FindMResult:
    """Least passing level plus the full search transcript."""

    m: int
    cert: FiltrationIndexCert
    failures: tuple  # FiltrationFailure for every level below m, from 2


def find_m(n: int, p: int, m_max: int = 24, rank: int = 3,
           max_pairs: int = 64) -> FindMResult:
    """Smallest m <= m_max whose certify_min_length scan passes.

    Passing is upward-closed (series that differ below degree m - 1 differ
    below degree m), so the first passing level is the least one.  Levels
    are scanned in blocks sharing one word-ball traversal; every failing
    level keeps a verified witness.  Raises NotFound when the budget is
    exhausted.
    """
    if m_max < 2:
        raise ShapeError("m_max must be at least 2")
    check_prime(p)
    radius = 6 * n
    failures = []
    block_size = 12
    lo = 2
    while lo <= m_max:
        hi = min(lo + block_size - 1, m_max)
        bounds = list(range(lo, hi + 1))
        impl = kernels.series_impl(rank, hi)
        count, pairs = impl.collision_scan(rank, radius, bounds, p, max_pairs)
        for m in bounds:
            cands = pairs[m]
            witness = None
            for a, b in cands:
                witness = _verify_pair(a, b, m, p, rank)
                if witness is not None:
                    break
            if witness is not None:
                failures.append(FiltrationFailure(n, p, m, radius, witness))
                continue
            if len(cands) >= max_pairs:
                raise BudgetExceeded(
                    f"{len(cands)} digest collisions at level {m}, none "
                    "verified; raise max_pairs")
            if cands:
                count2, hit = _exact_scan(rank, radius, m, p)
                if hit is not None:
                    witness = _verify_pair(hit[1], hit[0], m, p, rank)
                    if witness is None:
                        raise InvariantViolation(
                            "exact scan produced a bad collision")
                    failures.append(FiltrationFailure(n, p, m, radius, witness))
                    continue
                count = count2
            cert = FiltrationIndexCert(n, p, m, radius, count)
            return FindMResult(m, cert, tuple(failures))
        lo = hi + 1
    raise NotFound(f"no level up to {m_max} passes at n={n}, p={p}")


# --- generators of the filtration subgroup -----------------------------------

@dataclass(frozen=True)
class OmegaBasis:
    """Free basis of the level-``m`` subgroup from Schreier's method.

    ``words`` lists one generator per non-tree positive edge of the coset
    graph; ``index`` is the number of cosets.  Iterating yields the words.
    """

    m: int
    p: int
    rank: int
    index: int
    words: tuple

    def __iter__(self):
        return iter(self.words)

    def __len__(self):
        return len(self.words)

    def __getitem__(self, i):
        return self.words[i]


def omega_generators(m: int, p: int, rank: int = 3,
                     budget: int = 1 << 14) -> OmegaBasis:
    """Schreier generators of the level-``m`` subgroup of the free group.

    Cosets are identified by the exact degree-< m truncated series of any
    representative; the coset graph is finite (the quotient is a finite
    p-group) and is explored breadth-first with shortlex-least
    representatives.  Generators come from the non-tree positive edges of
    the spanning tree, and the Schreier index formula
    ``len = index * (rank - 1) + 1`` is asserted.
    """
    if m < 1:
        raise ShapeError("level must be at least 1")
    check_prime(p)
    impl = kernels.series_impl(rank, m)
    one = kernels.series_one()
    ids = {one: 0}
    reps: list = [()]
    trans: list = []
    order = 0
    while order < len(reps):
        series_here = None
        row = []
        rep = reps[order]
        if order == 0:
            series_here = one
        else:
            series_here = impl.word_series(rep, rank, m, p)
        for d in range(2 * rank):
            nxt = impl.series_mul_letter(series_here, d >> 1, d & 1, rank, m, p)
            t = ids.get(nxt)
            if t is None:
                t = len(reps)
                if t >= budget:
                    raise BudgetExceeded(
                        f"coset count exceeds budget {budget} at level {m}")
                ids[nxt] = t
                reps.append(reduce_word(rep + (d,)))
            row.append(t)
        trans.append(row)
        order += 1

    index = len(reps)
    tree_edges = set()
    for v in range(1, index):
        rep = reps[v]
        parent = ids[impl.word_series(rep[:-1], rank, m, p)]
        tree_edges.add((parent, rep[-1]))

    words = []
    for v in range(index):
        for d in range(0, 2 * rank, 2):
            t = trans[v][d]
            gen = reduce_word(mul(mul(reps[v], (d,)), inv(reps[t])))
            if (v, d) in tree_edges or (t, d ^ 1) in tree_edges:
                if gen:
                    raise InvariantViolation("tree edge gave a nontrivial word")
                continue
            if not gen:
                raise InvariantViolation("non-tree edge gave the empty word")
            words.append(gen)

    expected = index * (rank - 1) + 1
    if len(words) != expected:
        raise InvariantViolation(
            f"Schreier count {len(words)} != {expected} at index {index}")
    if len(set(words)) != len(words):
        raise InvariantViolation("duplicate Schreier generators")
    return OmegaBasis(m=m, p=p, rank=rank, index=index, words=tuple(words))


def _reduced_sequences(n_letters: int, length: int) -> Iterator[tuple]:
    """Freely reduced code sequences of the given length, lex order."""

    def go(prefix):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for c in range(n_letters):
            if prefix and c == prefix[-1] ^ 1:
                continue
            prefix.append(c)
            yield from go(prefix)
            prefix.pop()

    yield from go([])


def enumerate_tuples(m: int, p: int, n: int, count: int, rank: int = 3,
                     budget: int = 1 << 14) -> list:
    """First ``count`` n-tuples over the level-``m`` subgroup's free basis.

    Entries are nonempty products of basis elements and inverses; tuples
    are ordered by total basis-letter length, then lexicographically on
    the concatenated code sequence, then on the length profile.  Freeness
    of the basis makes the enumeration injective.
    """
    if n < 1 or count < 0:
        raise ShapeError("need n >= 1 and count >= 0")
    basis = omega_generators(m, p, rank, budget)
    n_codes = 2 * len(basis.words)
    as_words = []
    for w in basis.words:
        as_words.append(w)
        as_words.append(inv(w))

    out = []
    total = n
    while len(out) < count:
        batch = []
        for profile in _compositions(total, n):
            segs = [list(_reduced_sequences(n_codes, k)) for k in profile]
            batch.extend(
                (sum(choice, ()), profile, choice)
                for choice in _product_lists(segs))
        batch.sort(key=lambda t: (t[0], t[1]))
        for concat, profile, choice in batch:
            entry_words = tuple(
                reduce_word(sum((as_words[c] for c in seq), ()))
                for seq in choice)
            out.append(entry_words)
            if len(out) == count:
                break
        total += 1
        if total > n + 64:
            raise BudgetExceeded("tuple enumeration ran away")
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _product_lists(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product_lists(lists[1:]):
            yield (head,) + rest


def power_tuple_stream(m: int, p: int, n: int, count: int,
                       rank: int = 3) -> list:
    """Tuples of q-th powers, q the least power of p at or above m.

    Any q-th power lies in the level-q subgroup, hence in level m; each
    emitted entry is re-verified by membership at level m.  Base words run
    through shortlex order, skipping a word whose inverse came earlier, so
    entries within and across tuples are distinct.  This covers levels far
    beyond the reach of coset enumeration.
    """
    if n < 1 or count < 0:
        raise ShapeError("need n >= 1 and count >= 0")
    check_prime(p)
    q = 1
    while q < m:
        q *= p
    bases = []
    need = n * count
    for w in iter_reduced_words(rank, max_len=need + 2):
        if not w or inv(w) < w:
            continue
        bases.append(w)
        if len(bases) >= need:
            break
    if len(bases) < need:
        raise BudgetExceeded("not enough base words")
    out = []
    for i in range(count):
        entries = []
        for j in range(n):
            w = bases[i * n + j]
            power = reduce_word(w * q)
            if not zassenhaus_member(power, m, p):
                raise InvariantViolation(
                    f"power {q} of a base word failed membership at {m}")
            entries.append(power)
        out.append(tuple(entries))
    return out
