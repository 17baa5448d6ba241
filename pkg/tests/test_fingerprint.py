import random

import pytest
from hypothesis import given, settings, strategies as st

from cooc.errors import LengthMismatch, ParamSearchExhausted
from cooc.fingerprint import (EMPTY, FingerprintParams, GrammarFingerprints, choose_params,
                              fp_affix, fp_combine, fp_of_bytes, fp_power, fp_subtract,
                              random_params, verify_no_collisions)
from cooc.grammar import Leaf, Pair, Power, from_nested

SMALL = FingerprintParams(101, 10)
A, B = b"\x01", b"\x02"        # 'a' -> 1, 'b' -> 2


def direct(params, x: bytes) -> int:
    return sum(c * pow(params.r, k, params.p) for k, c in enumerate(x)) % params.p


def test_small_modulus_examples():
    fa, fb = fp_of_bytes(SMALL, A), fp_of_bytes(SMALL, B)
    assert (fa.phi, fb.phi) == (1, 2)
    fab = fp_combine(SMALL, fa, fb)
    assert fab.phi == 21
    assert fp_combine(SMALL, fab, EMPTY) == fab
    assert fp_subtract(SMALL, fab, fa).phi == 2
    assert fp_subtract(SMALL, fab, fb, known_is_prefix=False) == fa
    with pytest.raises(LengthMismatch):
        fp_subtract(SMALL, fa, fab)


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=30), st.binary(max_size=30), st.integers(0, 6))
def test_algebra_matches_direct_evaluation(x, y, q):
    params = random_params(random.Random(len(x) * 31 + len(y)))
    fx, fy = fp_of_bytes(params, x), fp_of_bytes(params, y)
    assert fp_combine(params, fx, fy) == fp_of_bytes(params, x + y)
    assert fp_combine(params, fx, fy).phi == direct(params, x + y)
    assert fp_subtract(params, fp_of_bytes(params, x + y), fx) == fy
    assert fp_power(params, fx, q) == fp_of_bytes(params, x * q)


def test_affix_examples():
    params = random_params(random.Random(1))
    g = from_nested([Leaf(97), Leaf(98), Pair(0, 1), Pair(2, 2)])
    ab = fp_of_bytes(params, b"ab")
    assert fp_affix(g, params, 3, "prefix", False, 4) == fp_combine(params, ab, ab)
    assert fp_affix(g, params, 3, "prefix", False, 0) == EMPTY
    h = from_nested([Leaf(97), Leaf(98), Pair(0, 1), Power(2, 5)])
    assert fp_affix(h, params, 3, "prefix", False, 7).phi == direct(params, b"abababa")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_affixes_of_random_grammars(seed):
    rng = random.Random(seed)
    prods = [Leaf(c) for c in b"abc"]
    for _ in range(rng.randint(1, 10)):
        n = len(prods)
        prods.append(Power(rng.randrange(n), rng.randint(2, 3)) if rng.random() < 0.3
                     else Pair(rng.randrange(n), rng.randrange(n)))
    g = from_nested(prods)
    params = random_params(rng)
    fps = GrammarFingerprints(g, params)
    for _ in range(20):
        a = rng.randrange(g.size)
        x = g.expand(a)
        length = rng.randint(0, len(x))
        side, rev = rng.choice(["prefix", "suffix"]), rng.random() < 0.5
        y = x[::-1] if rev else x      # affix of the reversed expansion
        piece = y[:length] if side == "prefix" else y[len(y) - length:]
        want = fp_of_bytes(params, piece)
        assert fps.affix(a, side, rev, length) == want


def test_choose_params_examples():
    params = choose_params([b"a", b"b"])
    assert fp_of_bytes(params, b"a").phi != fp_of_bytes(params, b"b").phi
    assert verify_no_collisions(choose_params([b"ab", b"ab"]), [b"ab", b"ab"])


def test_choose_params_retries_after_forced_collision():
    # over F_3 with 'a' = 97, 'b' = 98 the strings ab and ba collide exactly when r = 1
    colliding = [r for r in range(3) if direct(FingerprintParams(3, r), b"ab")
                 == direct(FingerprintParams(3, r), b"ba")]
    assert colliding == [1]
    assert choose_params([b"ab", b"ba"], p=3, r_values=[1, 2]).r == 2
    with pytest.raises(ParamSearchExhausted):
        choose_params([b"ab", b"ba"], p=3, r_values=[1])
