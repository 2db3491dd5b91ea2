"""Words, alphabets, and Nielsen reduction."""

import itertools
import random

import pytest

from tarskicert.errors import AlphabetMismatch, ShapeError
from tarskicert.freewords import (
    Alphabet,
    alphabet,
    commutator,
    conj,
    cyclic_rotations,
    cyclically_reduce,
    inv,
    mul,
    nielsen_reduce,
    random_reduced_word,
    reduce_word,
    reduced_words,
    word_key,
)

A2 = Alphabet(("x", "y"))
P = A2.parse


def test_reduce_cancellation():
    assert reduce_word((0, 1)) == ()
    assert reduce_word((0, 2)) == (0, 2)
    assert reduce_word((0, 2, 3, 0)) == (0, 0)


def test_reduce_idempotent_on_random_sequences():
    rng = random.Random(7)
    for _ in range(300):
        seq = tuple(rng.randrange(6) for _ in range(rng.randrange(12)))
        once = reduce_word(seq)
        assert reduce_word(once) == once


def test_group_laws_on_random_words():
    rng = random.Random(8)
    for _ in range(200):
        u = random_reduced_word(rng, 3, rng.randrange(8))
        v = random_reduced_word(rng, 3, rng.randrange(8))
        assert mul(u, inv(u)) == ()
        assert inv(inv(u)) == u
        w = mul(u, v)
        assert len(w) <= len(u) + len(v)
        assert (len(w) - len(u) - len(v)) % 2 == 0
        assert mul(inv(v), inv(u)) == inv(w)


def test_conjugation():
    assert conj(P("x"), P("y")) == P("y^-1 x y")
    assert conj(P("y^-1 x y"), P("y")) == P("y^-1 y^-1 x y y")
    rng = random.Random(9)
    for _ in range(100):
        u = random_reduced_word(rng, 2, rng.randrange(6))
        g = random_reduced_word(rng, 2, rng.randrange(6))
        assert len(conj(u, g)) <= len(u) + 2 * len(g)


def test_commutator():
    assert commutator(P("x"), P("y")) == P("x^-1 y^-1 x y")
    assert commutator(P("x"), P("x")) == ()


def test_word_key_is_shortlex():
    words = [P("1"), P("x"), P("x^-1"), P("y"), P("x x"), P("x y")]
    assert sorted(words, key=word_key) == words


def test_reduced_words_counts():
    assert len(reduced_words(2, 0)) == 1
    assert len(reduced_words(2, 1)) == 5
    assert len(reduced_words(2, 2)) == 1 + 4 + 12
    ws = reduced_words(3, 3)
    assert len(ws) == 1 + 6 + 30 + 150
    assert all(reduce_word(w) == w for w in ws)


def test_cyclic_helpers():
    w = P("x y x^-1")
    assert cyclically_reduce(w) == P("y")
    rots = set(cyclic_rotations(P("x y")))
    assert P("y x") in rots and P("x y") in rots


def test_alphabet_parse_format_round_trip():
    a = Alphabet(("x", "y1", "y2", "z"))
    w = a.parse("x y1^-1 z z")
    assert a.format(w) == "x y1^-1 z z"
    assert a.parse("x^3 y1^-2") == (0, 0, 0, 3, 3)
    assert a.format(()) == "1"
    assert a.parse("1") == ()


def test_alphabet_errors():
    with pytest.raises(ShapeError):
        Alphabet(("x", "x"))
    with pytest.raises(ShapeError):
        Alphabet(("2bad",))
    with pytest.raises(ShapeError):
        A2.parse("q")
    with pytest.raises(AlphabetMismatch):
        A2.check((4,))


def test_default_alphabet():
    assert alphabet(3).names == ("x", "y", "z")
    assert alphabet(2, names=("a", "b")).names == ("a", "b")


def test_nielsen_goldens():
    assert nielsen_reduce((P("x"), P("x y"))) == [P("x"), P("y")]
    assert nielsen_reduce((P("x"), P("x"))) == [P("x")]
    assert nielsen_reduce((P("x"), P("y"))) == [P("x"), P("y")]
    assert nielsen_reduce((P("1"),)) == []
    assert nielsen_reduce((P("x^2"), P("x^-2"))) == [P("x^2")]
    # a generator plus a power of its inverse collapses to one element
    assert nielsen_reduce((P("x"), P("x^-2"))) == [P("x")]


def test_nielsen_never_grows_and_drops_trivial():
    rng = random.Random(10)
    for _ in range(60):
        k = rng.randint(1, 3)
        t = tuple(random_reduced_word(rng, 3, rng.randint(0, 6))
                  for _ in range(k))
        basis = nielsen_reduce(t)
        assert len(basis) <= sum(1 for w in t if w)
        assert all(w for w in basis)


def test_nielsen_product_length_property():
    """Products of m basis factors with no adjacent inverse pair have
    reduced length at least m."""
    rng = random.Random(11)
    for _ in range(25):
        k = rng.randint(1, 3)
        t = tuple(random_reduced_word(rng, 3, rng.randint(1, 6))
                  for _ in range(k))
        basis = nielsen_reduce(t)
        sym = [w for b in basis for w in (b, inv(b))]
        for m in (2, 3):
            for combo in itertools.product(range(len(sym)), repeat=m):
                if any(combo[i] ^ 1 == combo[i + 1] for i in range(m - 1)):
                    continue
                prod = mul(*(sym[i] for i in combo))
                assert len(prod) >= m
