"""Tests for truncated-series membership, length certificates, and bases.

The oracle for the series map is an independent dict-backed polynomial
arithmetic defined inline: generators map to 1 + X, inverses to the
truncated geometric series, products multiply term by term mod p.
"""

import itertools
import random

import pytest

from tarskicert.errors import BudgetExceeded, NotFound, ShapeError
from tarskicert.filtration import (
    FiltrationFailure,
    FiltrationIndexCert,
    OmegaBasis,
    TruncSeries,
    certify_min_length,
    check_prime,
    enumerate_tuples,
    find_m,
    magnus,
    omega_generators,
    power_tuple_stream,
    zassenhaus_member,
)
from tarskicert.freewords import alphabet, inv, iter_reduced_words, mul
from tarskicert.stallings import core_graph

X = (0,)
Y = (2,)
Z = (4,)
A3 = alphabet(3)


# --- independent series oracle ------------------------------------------


def poly_mul(a, b, n, p):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = ma + mb
            if len(m) >= n:
                continue
            c = (out.get(m, 0) + ca * cb) % p
            if c:
                out[m] = c
            else:
                out.pop(m, None)
    return out

def oracle_series(word, n, p):
    """Map a word to {monomial tuple: coeff}, degrees below n, mod p."""
    acc = {(): 1}
    for d in word:
        v = d >> 1
        if d & 1 == 0:
            factor = {(): 1, (v,): 1}
        else:
            # (1 + X)^-1 = 1 - X + X^2 - ... truncated below degree n
            factor = {(v,) * k: pow(-1, k, p) for k in range(n)}
        acc = poly_mul(acc, factor, n, p)
    return acc

def oracle_member(word, n, p):
    return oracle_series(word, n, p) == {(): 1}


def test_magnus_matches_oracle_on_random_words():
    rng = random.Random(7)
    for _ in range(120):
        n = rng.randrange(1, 7)
        p = rng.choice([2, 3, 5])
        length = rng.randrange(0, 9)
        word, prev = [], None
        for _ in range(length):
            d = rng.randrange(6)
            while prev is not None and d == prev ^ 1:
                d = rng.randrange(6)
            word.append(d)
            prev = d
        got = magnus(tuple(word), n, p, rank=3)
        want = oracle_series(tuple(word), n, p)
        assert dict(got.monomials()) == want


# --- membership goldens ---------------------------------------------------


def test_membership_goldens_p2():
    xx = mul(X, X)
    comm = mul(mul(X, Y), mul(inv(X), inv(Y)))
    assert zassenhaus_member(xx, 2, 2)
    assert zassenhaus_member(comm, 2, 2)
    assert not zassenhaus_member(X, 2, 2)
    assert not zassenhaus_member(xx, 3, 2)
    assert zassenhaus_member(X * 4, 4, 2)
    assert not zassenhaus_member(X * 4, 5, 2)


def test_membership_goldens_p3():
    assert zassenhaus_member(X * 3, 3, 3)
    assert not zassenhaus_member(X * 3, 4, 3)
    assert not zassenhaus_member(X * 2, 2, 3)


def test_series_str_goldens():
    assert str(magnus(X, 3, 2)) == "1 + X1"
    assert str(magnus(mul(mul(X, Y), mul(inv(X), inv(Y))), 3, 2)) == \
        "1 + X1*X2 + X2*X1"
    assert str(magnus((), 3, 2)) == "1"


def test_nesting_is_monotone():
    rng = random.Random(11)
    words = [X * 8, Y * 4, mul(mul(X, Y), mul(inv(X), inv(Y)))]
    comm = words[-1]
    words.append(mul(mul(comm, X), mul(inv(comm), inv(X))))
    for _ in range(500 - len(words)):
        length = rng.randrange(1, 10)
        w, prev = [], None
        for _ in range(length):
            d = rng.randrange(6)
            while prev is not None and d == prev ^ 1:
                d = rng.randrange(6)
            w.append(d)
            prev = d
        words.append(tuple(w))
    for w in words:
        flags = [zassenhaus_member(w, n, 2) for n in range(1, 7)]
        # once membership fails at some level it fails at all deeper ones
        assert flags == sorted(flags, reverse=True)


def test_membership_is_conjugation_invariant():
    rng = random.Random(13)
    members = [X * 2, Y * 2, mul(mul(X, Y), mul(inv(X), inv(Y)))]
    for _ in range(100):
        w = rng.choice(members)
        length = rng.randrange(0, 5)
        g, prev = [], None
        for _ in range(length):
            d = rng.randrange(6)
            while prev is not None and d == prev ^ 1:
                d = rng.randrange(6)
            g.append(d)
            prev = d
        conj = mul(mul(tuple(g), w), inv(tuple(g)))
        assert zassenhaus_member(conj, 2, 2)


def test_series_multiplication_is_a_homomorphism():
    rng = random.Random(17)
    for _ in range(60):
        n = rng.randrange(1, 6)
        p = rng.choice([2, 3])
        us, vs = [], []
        for out in (us, vs):
            prev = None
            for _ in range(rng.randrange(0, 6)):
                d = rng.randrange(6)
                while prev is not None and d == prev ^ 1:
                    d = rng.randrange(6)
                out.append(d)
                prev = d
        u, v = tuple(us), tuple(vs)
        lhs = magnus(mul(u, v), n, p, rank=3)
        rhs = magnus(u, n, p, rank=3).mul(magnus(v, n, p, rank=3))
        assert lhs == rhs


def test_series_shape_errors():
    with pytest.raises(ShapeError):
        magnus(X, 0, 2)
    with pytest.raises(ShapeError):
        magnus(Z, 2, 2, rank=1)
    s2 = magnus(X, 2, 2, rank=3)
    s3 = magnus(X, 3, 2, rank=3)
    with pytest.raises(ShapeError):
        s2.mul(s3)
    with pytest.raises(ShapeError):
        s2.truncate(4)
    assert s3.truncate(2) == s2


def test_check_prime():
    for p in (2, 3, 5, 7, 13):
        assert check_prime(p) == p
    for p in (0, 1, 4, 9, 15):
        with pytest.raises(ShapeError):
            check_prime(p)


# --- certified minimum lengths --------------------------------------------


def test_certify_min_length_passes_at_level_13():
    cert = certify_min_length(13, 1, 2)
    assert isinstance(cert, FiltrationIndexCert)
    assert cert.passed
    assert cert.radius == 6
    assert cert.checked_count == 23437
    # 23437 = all freely reduced rank-3 words of length at most 6
    assert cert.checked_count == sum(
        1 for _ in iter_reduced_words(3, max_len=6))


def test_certify_min_length_fails_at_level_2():
    res = certify_min_length(2, 1, 2)
    assert isinstance(res, FiltrationFailure)
    assert not res.passed
    assert res.witness == (0, 0)
    assert zassenhaus_member(res.witness, 2, 2)


def test_find_m_transcript(findm12):
    res = findm12
    assert res.m == 9
    assert res.cert.checked_count == 23437
    assert [f.m for f in res.failures] == [2, 3, 4, 5, 6, 7, 8]
    expected = {
        2: (0, 0),
        3: (0, 0, 0, 0),
        4: (0, 0, 0, 0),
        5: (0, 0, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1),
    }
    for f in res.failures:
        assert f.witness == expected.get(f.m, expected[5])
        assert f.witness != ()
        assert len(f.witness) <= 2 * f.radius
        assert zassenhaus_member(f.witness, f.m, f.p)
        assert oracle_member(f.witness, f.m, f.p)


def test_find_m_shape_errors():
    with pytest.raises(ShapeError):
        find_m(1, 2, m_max=1)
    with pytest.raises(NotFound):
        find_m(1, 2, m_max=3)


def test_failure_json_uses_alphabet():
    res = certify_min_length(2, 1, 2)
    js = res.to_json(A3)
    assert js["witness"] == "x x"
    assert js["kind"] == "filtration-index"


# --- free bases of filtration subgroups ------------------------------------


def test_omega_basis_level2_p2():
    basis = omega_generators(2, 2, 3)
    assert isinstance(basis, OmegaBasis)
    assert basis.index == 8
    assert len(basis) == 17
    assert basis[0] == basis.words[0]
    for w in basis:
        assert zassenhaus_member(w, 2, 2)


def test_omega_basis_generates_exactly_the_subgroup():
    # membership through the basis core must agree with the series test
    basis = omega_generators(2, 2, 3)
    core = core_graph(3, basis.words)
    for w in iter_reduced_words(3, max_len=5):
        assert core.member(w) == zassenhaus_member(w, 2, 2)


def test_enumerate_tuples_golden():
    tuples = enumerate_tuples(2, 2, 2, 4, rank=2)
    assert [tuple(A3.format(w) for w in t) for t in tuples] == [
        ("x x", "x x"),
        ("x x", "x^-1 x^-1"),
        ("x x", "y x y^-1 x^-1"),
        ("x x", "x y x^-1 y^-1"),
    ]
    assert len(set(tuples)) == len(tuples)
    for t in tuples:
        for w in t:
            assert w != ()
            assert zassenhaus_member(w, 2, 2)


def test_power_tuple_stream_golden():
    tuples = power_tuple_stream(16, 2, 2, 3)
    assert [tuple(A3.format(w) for w in t) for t in tuples][0] == (
        "x " * 15 + "x", "y " * 15 + "y")
    flat = [w for t in tuples for w in t]
    assert len(set(flat)) == len(flat)
    for w in flat:
        assert zassenhaus_member(w, 16, 2)


def test_tuple_enumeration_shape_errors():
    with pytest.raises(ShapeError):
        enumerate_tuples(2, 2, 0, 1)
    with pytest.raises(ShapeError):
        power_tuple_stream(2, 2, 1, -1)
