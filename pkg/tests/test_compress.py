import math

import pytest
from hypothesis import given, settings, strategies as st

from cooc import oracle
from cooc.compress import (C_0, C_H, LevelScheme, NoOccurrenceCertificate, SplitSet, build_slp,
                           compute_splits, dump_grammar_file, height_bound, load_grammar_file,
                           recompress_text, to_rlslp)
from cooc.corpora import fibonacci_slp, fibonacci_word
from cooc.errors import EmptyPattern, EmptyText
from cooc.grammar import Leaf, Pair, Power, from_nested

from conftest import EXAMPLE

texts = st.builds(lambda s, k: s[:k], st.text("abc", min_size=1, max_size=120), st.integers(1, 120)) \
    .map(str.encode).filter(bool)


@pytest.mark.parametrize("text", [b"abab", b"a", EXAMPLE])
def test_build_slp_round_trip(text):
    g = build_slp(text)
    assert g.expand() == text and g.kind == "SLP"
    if text == b"a":
        assert g.size == 1 and isinstance(g.productions[0], Leaf)


def test_empty_text_rejected():
    with pytest.raises(EmptyText):
        build_slp(b"")
    with pytest.raises(EmptyText):
        recompress_text(b"")


def test_unary_text_gets_a_run_rule():
    rl, _ = to_rlslp(build_slp(b"a" * 8))
    assert rl.expand() == b"a" * 8
    runs = [p for p in rl.productions if isinstance(p, Power)]
    assert runs and any(rl.expand(p.base) == b"a" for p in runs)


def test_two_letters_are_shallow():
    rl, _ = to_rlslp(build_slp(b"ab"))
    assert rl.expand() == b"ab" and rl.grammar_height() <= 2


def test_fibonacci_height():
    rl, _ = to_rlslp(fibonacci_slp(10946))
    assert rl.expand() == fibonacci_word(10946)
    assert rl.grammar_height() <= C_H * math.log2(10946) + C_0


def test_height_bound_helper():
    assert height_bound(1024) == C_H * 10 + C_0


def test_same_seed_same_grammar():
    a, sa = recompress_text(EXAMPLE * 5, seed=7)
    b, sb = recompress_text(EXAMPLE * 5, seed=7)
    assert a.productions == b.productions and sa == sb


def test_broad_splits_small_examples():
    g = from_nested([Leaf(ord("a")), Leaf(ord("b")), Pair(0, 1)])
    assert compute_splits(g, LevelScheme(), b"ab", "broad").splits == (1,)
    h = from_nested([Leaf(ord("a")), Leaf(ord("b")), Pair(0, 1), Power(2, 3)])
    assert compute_splits(h, LevelScheme(), b"ba", "broad").splits == (1,)
    assert oracle.naive_relevant(h, 3, b"ba") == [(1, 1)]


def test_example_splits_contain_one():
    for seed in range(5):
        g, scheme = recompress_text(EXAMPLE, seed)
        assert 1 in compute_splits(g, scheme, b"cab").splits


def test_absent_pattern_gets_certificate():
    g, scheme = recompress_text(EXAMPLE)
    assert isinstance(compute_splits(g, scheme, b"zz"), NoOccurrenceCertificate)
    with pytest.raises(EmptyPattern):
        compute_splits(g, scheme, b"")
    with pytest.raises(ValueError):
        compute_splits(g, scheme, b"a", "nope")


@settings(max_examples=80, deadline=None)
@given(texts, st.integers(0, 3), st.data())
def test_fast_splits_cover_every_relevant_split(text, seed, data):
    g, scheme = recompress_text(text, seed)
    i = data.draw(st.integers(0, len(text) - 1))
    m = data.draw(st.integers(1, 10))
    for pat in (text[i:i + m], data.draw(st.binary(min_size=1, max_size=4))):
        fast = compute_splits(g, scheme, pat)
        truth = oracle.naive_splits(g, pat)
        if isinstance(fast, NoOccurrenceCertificate):
            assert pat not in text and not truth.splits
        else:
            assert isinstance(fast, SplitSet)
            assert set(truth.splits) <= set(fast.splits)


def test_grammar_file_keeps_scheme():
    g, scheme = recompress_text(EXAMPLE)
    g2, s2 = load_grammar_file(dump_grammar_file(g, scheme))
    assert g2.productions == g.productions and s2 == scheme
    g3, s3 = load_grammar_file(dump_grammar_file(build_slp(EXAMPLE)))
    assert s3 is None and g3.expand() == EXAMPLE
