# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled compute kernels; behavioral twin of tarskicert._speedups_py.

Hot paths (series products, ball scans, word enumeration) run on C++
unordered_map / vector state. Cold helpers are reused from the pure module
so there is a single source of truth for them.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libc.stdint cimport int64_t, uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from tarskicert._speedups_py import series_mul, series_truncate

IMPLEMENTATION = "cython"

ctypedef unordered_map[int64_t, int64_t] series_t


def series_one():
    return ((1, 1),)


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef void _mul_letter_c(series_t& sd, series_t& out, int gi, int neg,
                        int64_t B, int64_t top, int64_t p):
    cdef series_t tmp
    cdef series_t.iterator it = sd.begin()
    cdef int64_t k, c, k2, s
    cdef int64_t dig = gi + 1
    tmp.reserve(2 * sd.size() + 8)
    while it != sd.end():
        k = deref(it).first
        c = deref(it).second
        tmp[k] = (tmp[k] + c) % p
        if neg == 0:
            if k < top:
                k2 = k * B + dig
                tmp[k2] = (tmp[k2] + c) % p
        else:
            k2 = k
            s = c
            while k2 < top:
                k2 = k2 * B + dig
                s = (p - s) % p
                tmp[k2] = (tmp[k2] + s) % p
        inc(it)
    out.clear()
    it = tmp.begin()
    while it != tmp.end():
        if deref(it).second != 0:
            out[deref(it).first] = deref(it).second
        inc(it)


cdef list _to_pairs(series_t& sd):
    cdef series_t.iterator it = sd.begin()
    cdef list out = []
    while it != sd.end():
        out.append((deref(it).first, deref(it).second))
        inc(it)
    out.sort()
    return out


cdef inline bytes _word_bytes(vector[char]& word):
    if word.size() == 0:
        return b""
    return (<char*>word.data())[:word.size()]


def series_mul_letter(series, gen_index, negative, rank, degree_bound, p):
    cdef series_t sd, out
    cdef int64_t B = rank + 1
    cdef int64_t top = (rank + 1) ** (degree_bound - 1)
    for k, c in series:
        sd[k] = c
    _mul_letter_c(sd, out, gen_index, 1 if negative else 0, B, top, p)
    return tuple(_to_pairs(out))


def word_series(word, rank, degree_bound, p):
    cdef series_t a, b
    cdef int64_t B = rank + 1
    cdef int64_t top = (rank + 1) ** (degree_bound - 1)
    cdef int64_t pp = p
    cdef int d
    cdef bint flip = False
    a[1] = 1 % pp
    for d0 in word:
        d = d0
        if not flip:
            _mul_letter_c(a, b, d >> 1, d & 1, B, top, pp)
        else:
            _mul_letter_c(b, a, d >> 1, d & 1, B, top, pp)
        flip = not flip
    if flip:
        a = b
    return tuple(_to_pairs(a))


cdef void _scan_visit(series_t& sd, int last, int rank, int radius,
                      vector[char]& word, int64_t B, int64_t top, int64_t p,
                      int64_t* powers, int bound, list bounds_list,
                      dict seen, dict pairs, int max_pairs,
                      long long* count):
    cdef uint64_t acc[64]
    cdef uint64_t x
    cdef int i, d, dd
    cdef int64_t k, c
    cdef series_t.iterator it
    cdef series_t child
    cdef bytes wb
    cdef dict mseen
    cdef list mpairs, bucket

    count[0] += 1
    for i in range(bound):
        acc[i] = 0
    it = sd.begin()
    while it != sd.end():
        k = deref(it).first
        c = deref(it).second
        d = 0
        while powers[d + 1] <= k:
            d += 1
        acc[d] ^= _mix(<uint64_t>k * <uint64_t>0x100000001B3 + <uint64_t>c)
        inc(it)

    wb = _word_bytes(word)
    x = 0
    i = 0
    for m in bounds_list:
        while i < <int>m:
            x ^= acc[i]
            i += 1
        mseen = <dict>seen[m]
        mpairs = <list>pairs[m]
        bucket = <list>mseen.get(x)
        if bucket is None:
            mseen[x] = [wb]
        else:
            if len(mpairs) < max_pairs:
                for prev in bucket:
                    mpairs.append((prev, wb))
            if len(bucket) < 8:
                bucket.append(wb)

    if <int>word.size() == radius:
        return
    for dd in range(2 * rank):
        if dd == (last ^ 1):
            continue
        word.push_back(<char>dd)
        _mul_letter_c(sd, child, dd >> 1, dd & 1, B, top, p)
        _scan_visit(child, dd, rank, radius, word, B, top, p, powers,
                    bound, bounds_list, seen, pairs, max_pairs, count)
        word.pop_back()


def collision_scan(rank, radius, bounds, p, max_pairs=64):
    bounds_list = sorted(set(bounds))
    cdef int bound = bounds_list[len(bounds_list) - 1]
    if bound >= 64:
        raise ValueError("truncation bound too large for the compiled scan")
    cdef int64_t B = rank + 1
    cdef int64_t top = (rank + 1) ** (bound - 1)
    cdef vector[int64_t] powers
    cdef int i
    for i in range(bound + 1):
        powers.push_back((rank + 1) ** i)
    seen = {m: {} for m in bounds_list}
    pairs = {m: [] for m in bounds_list}
    cdef vector[char] word
    cdef series_t sd
    cdef long long count = 0
    sd[1] = 1 % <int64_t>p
    _scan_visit(sd, -1, rank, radius, word, B, top, p, powers.data(),
                bound, bounds_list, seen, pairs, max_pairs, &count)
    return count, pairs


cdef void _loops_visit(int* trans, int deg, int base, int max_len,
                       int v, int last, vector[char]& word, set out):
    cdef int d, w, row
    if v == base:
        out.add(_word_bytes(word))
    if <int>word.size() == max_len:
        return
    row = v * deg
    for d in range(deg):
        if d == (last ^ 1):
            continue
        w = trans[row + d]
        if w < 0:
            continue
        word.push_back(<char>d)
        _loops_visit(trans, deg, base, max_len, w, d, word, out)
        word.pop_back()


def loop_words(trans, nv, deg, base, max_len):
    cdef vector[int] t
    for v in trans:
        t.push_back(v)
    out = set()
    cdef vector[char] word
    _loops_visit(t.data(), deg, base, max_len, base, -1, word, out)
    return out


cdef void _prod_visit(vector[vector[char]]& fs, int max_factors, int max_len,
                      int maxflen, int used, int lastf,
                      vector[char]& word, set out):
    cdef int j, k, i, added, fsize
    cdef vector[char] removed
    cdef vector[char]* f
    if <int>word.size() <= max_len:
        out.add(_word_bytes(word))
    if used == max_factors:
        return
    if <int>word.size() - (max_factors - used) * maxflen > max_len:
        return
    for j in range(<int>fs.size()):
        if j == (lastf ^ 1):
            continue
        f = &fs[j]
        fsize = <int>f[0].size()
        if fsize == 0:
            continue
        removed.clear()
        k = 0
        while k < fsize and word.size() > 0 and word.back() == (f[0][k] ^ 1):
            removed.push_back(word.back())
            word.pop_back()
            k += 1
        added = fsize - k
        for i in range(k, fsize):
            word.push_back(f[0][i])
        _prod_visit(fs, max_factors, max_len, maxflen, used + 1, j, word, out)
        for i in range(added):
            word.pop_back()
        while removed.size() > 0:
            word.push_back(removed.back())
            removed.pop_back()


def nielsen_products(factors, max_factors, max_len):
    cdef vector[vector[char]] fs
    cdef vector[char] f
    cdef int maxflen = 0
    for fb in factors:
        f.clear()
        for d in fb:
            f.push_back(<char>d)
        fs.push_back(f)
        if len(fb) > maxflen:
            maxflen = len(fb)
    out = set()
    cdef vector[char] word
    _prod_visit(fs, max_factors, max_len, maxflen, 0, -1, word, out)
    return out
