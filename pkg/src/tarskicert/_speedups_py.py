"""Pure-Python compute kernels.

The compiled extension ``tarskicert._speedups`` exports the same names with
the same observable behavior; ``tarskicert.kernels`` picks one at import
time. Everything here sticks to ints, bytes, dicts and sets so results can
be compared across the two implementations.

A truncated series lives in the free associative F_p-algebra on ``rank``
noncommuting variables, keeping monomials of total degree < degree_bound.
A monomial is packed into one int: leading sentinel digit 1, then one digit
per variable occurrence, base rank+1 (variable i is digit i+1). The empty
monomial is key 1, and a key of degree d lies in [B**d, B**(d+1)).
Canonical form at the API boundary: tuple of (key, coeff) sorted by key,
zero coefficients dropped.
"""

from __future__ import annotations

from bisect import bisect_right

IMPLEMENTATION = "pure"

_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    # splitmix64 finalizer; deterministic term hash for collision scans
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def series_one() -> tuple:
    return ((1, 1),)


def _mul_letter(sd: dict, gi: int, neg: int, B: int, top: int, p: int) -> dict:
    """Right-multiply series dict by the image of one letter.

    A generator maps to 1 + X, its inverse to 1 - X + X^2 - ... cut at the
    degree bound. top = B**(degree_bound-1): appending a digit to a key
    below top keeps the monomial under the bound.
    """
    dig = gi + 1
    out = {}
    get = out.get
    if not neg:
        for k, c in sd.items():
            out[k] = (get(k, 0) + c) % p
            if k < top:
                k2 = k * B + dig
                out[k2] = (get(k2, 0) + c) % p
    else:
        for k, c in sd.items():
            out[k] = (get(k, 0) + c) % p
            k2 = k
            s = c
            while k2 < top:
                k2 = k2 * B + dig
                s = p - s if s else 0
                out[k2] = (get(k2, 0) + s) % p
    return {k: c for k, c in out.items() if c}


def series_mul_letter(series, gen_index, negative, rank, degree_bound, p):
    B = rank + 1
    top = B ** (degree_bound - 1)
    sd = _mul_letter(dict(series), gen_index, 1 if negative else 0, B, top, p)
    return tuple(sorted(sd.items()))


def word_series(word, rank, degree_bound, p):
    """Truncated image of a word under generator i -> 1 + X_i."""
    B = rank + 1
    top = B ** (degree_bound - 1)
    sd = {1: 1 % p}
    for d in word:
        sd = _mul_letter(sd, d >> 1, d & 1, B, top, p)
    return tuple(sorted(sd.items()))


def series_mul(s1, s2, rank, degree_bound, p):
    B = rank + 1
    powers = [B ** i for i in range(degree_bound + 1)]
    pre = []
    for k2, c2 in s2:
        d2 = bisect_right(powers, k2) - 1
        if d2 >= degree_bound:
            continue
        pre.append((powers[d2], k2 - powers[d2], c2, powers[degree_bound - d2]))
    out = {}
    get = out.get
    for k1, c1 in s1:
        for shift, tail, c2, lim in pre:
            if k1 < lim:
                key = k1 * shift + tail
                out[key] = (get(key, 0) + c1 * c2) % p
    return tuple(sorted((k, c) for k, c in out.items() if c))


def series_truncate(series, rank, new_bound):
    lim = (rank + 1) ** new_bound
    return tuple((k, c) for k, c in series if k < lim)


def collision_scan(rank, radius, bounds, p, max_pairs=64):
    """DFS all reduced words of length <= radius; key each word by the
    digest of its degree-<m truncation for every m in bounds.

    Returns (word_count, {m: [(word_a, word_b), ...]}) where the pairs are
    digest collisions (bytes of letter codes), candidates to be verified
    exactly by the caller. Buckets keep up to 8 words so a genuine
    truncation collision cannot hide behind a 64-bit digest accident.
    """
    bounds = sorted(set(bounds))
    bound = bounds[-1]
    B = rank + 1
    top = B ** (bound - 1)
    powers = [B ** i for i in range(bound + 1)]
    seen = {m: {} for m in bounds}
    pairs = {m: [] for m in bounds}
    count = 0
    word = bytearray()

    def record(sd):
        acc = [0] * bound
        for k, c in sd.items():
            acc[bisect_right(powers, k) - 1] ^= _mix(k * 0x100000001B3 + c)
        wb = bytes(word)
        x = 0
        i = 0
        for m in bounds:
            while i < m:
                x ^= acc[i]
                i += 1
            bucket = seen[m].setdefault(x, [])
            if len(pairs[m]) < max_pairs:
                for prev in bucket:
                    pairs[m].append((prev, wb))
            if len(bucket) < 8:
                bucket.append(wb)

    def visit(sd, last):
        nonlocal count
        count += 1
        record(sd)
        if len(word) == radius:
            return
        for d in range(2 * rank):
            if d == last ^ 1:
                continue
            word.append(d)
            visit(_mul_letter(sd, d >> 1, d & 1, B, top, p), d)
            word.pop()

    visit({1: 1 % p}, -1)
    return count, pairs


def loop_words(trans, nv, deg, base, max_len):
    """All reduced words of length <= max_len tracing base back to base in
    a deterministic letter graph.

    trans is flat: vertex v moves along letter d to trans[v*deg + d], -1 if
    the edge is absent. Returns a set of bytes; includes the empty word.
    """
    out = set()
    word = bytearray()

    def go(v, last):
        if v == base:
            out.add(bytes(word))
        if len(word) == max_len:
            return
        row = v * deg
        for d in range(deg):
            if d == last ^ 1:
                continue
            w = trans[row + d]
            if w < 0:
                continue
            word.append(d)
            go(w, d)
            word.pop()

    go(base, -1)
    return out


def nielsen_products(factors, max_factors, max_len):
    """Reduced products of at most max_factors elements of ``factors``.

    factors: sequence of bytes, closed under inversion with pairing
    index ^ 1 (entry 2t+1 is the inverse of entry 2t). Skipping an
    immediately cancelling factor pair loses nothing: that product equals
    one with two fewer factors. Returns the set of products of length
    <= max_len as bytes; includes the empty word.
    """
    out = set()
    word = []
    maxflen = max((len(f) for f in factors), default=0)

    def go(used, lastf):
        if len(word) <= max_len:
            out.add(bytes(word))
        if used == max_factors:
            return
        if len(word) - (max_factors - used) * maxflen > max_len:
            return
        for j, f in enumerate(factors):
            if j == lastf ^ 1 or not f:
                continue
            removed = []
            k = 0
            while k < len(f) and word and word[-1] == f[k] ^ 1:
                removed.append(word.pop())
                k += 1
            added = len(f) - k
            word.extend(f[k:])
            go(used + 1, j)
            if added:
                del word[-added:]
            while removed:
                word.append(removed.pop())

    go(0, -1)
    return out
