import random

import pytest

from cooc import oracle
from cooc.coindex import (CoPatternHandle, PrunedParseTree, candidate_nonterminals,
                          query_close, relevant_close_co_occurrences, report_from_anchors,
                          short_period)
from cooc.errors import EagerTooLarge, EmptyPattern, NegativeBound
from cooc.grammar import Leaf, Pair, Power, from_nested
from cooc.compress import LevelScheme
from cooc.occindex import build_occ_index
from cooc.coindex import build_co_index

from conftest import EXAMPLE, broad_index, grammar_of_strings, random_texts, text_index

A_, B_, C_ = ord("a"), ord("b"), ord("c")


def x3():
    return from_nested([Leaf(A_), Leaf(B_), Pair(0, 1)])


def x4():
    return from_nested([Leaf(A_), Leaf(B_), Pair(0, 1), Pair(2, 2)])


def run3():
    return from_nested([Leaf(A_), Leaf(B_), Pair(0, 1), Power(2, 3)])


def abac():
    # 3: B = ab, 4: C = ac, 5: A = B C
    return from_nested([Leaf(A_), Leaf(B_), Leaf(C_), Pair(0, 1), Pair(0, 2), Pair(3, 4)])


def strings(t):
    return sorted(t.view.materialize(e) for e in t.sorted_entries)


def test_anchor_tries_single_rule():
    _, ci = broad_index(x3())
    assert strings(ci.t_suf) == [b"b"]
    assert strings(ci.t_pre) == [b"a"]


def test_anchor_tries_for_run_of_five():
    g = from_nested([Leaf(A_), Leaf(B_), Pair(0, 1), Power(2, 5)])
    _, ci = broad_index(g)
    suf = strings(ci.t_suf)
    for j in (1, 2, 3, 4):
        assert b"ab" * j in suf
    assert b"ab" * 5 not in suf
    assert b"ba" * 4 in strings(ci.t_pre)


def test_pruned_tree_next_link():
    t = PrunedParseTree(x4())
    assert t.label[:5] == [3, 2, 0, 1, 2]
    first, second = 1, 4
    assert t.nxt[first] == second
    assert second == len(t) - 1            # the second X3 keeps no children
    assert t.off[second] == 2
    assert all(t.anc[v] >= 0 for v in range(1, len(t)))


def test_quadruple_case_one_distance():
    g = abac()
    occ, ci = broad_index(g)
    u = ci.t_pre.locus(b"a").node
    vb, vc = ci.t_suf.locus(b"b").node, ci.t_suf.locus(b"c").node
    assert ci.anchor(u, vb).text == b"ab" and ci.anchor(u, vc).text == b"ac"
    rec = ci.quadruple((u, u, vb, vc))
    assert (2, 5) in rec.t1
    same = ci.quadruple((u, u, vb, vb))
    assert (0, 3) in same.t1               # B has a relevant "ab" with split 1


def test_periodic_t2_entries_match_brute_force():
    g, _ = grammar_of_strings([b"abab"], power=(b"ab", 6))
    occ, ci = broad_index(g)
    ci.materialize_all()
    nonzero = 0
    for rec in ci._quads.values():
        if rec.pi1 is None:
            continue
        s1 = ci.anchor(rec.key[0], rec.key[2]).text
        assert oracle.period(s1) == rec.pi1
        for q, a in rec.t2:
            r2 = g.head_len(a) - rec.l2
            lo, hi = max(0, r2 - rec.n1 + 1), min(r2, r2 + rec.n2 - rec.n1)
            inside = [p for p in oracle.naive_occurrences(g.expand(a), s1) if lo <= p <= hi]
            assert q == (inside[-1] - inside[0]) // rec.pi1
            nonzero += q > 0
    assert nonzero > 0


def test_short_period():
    assert short_period(b"abab") == 2
    assert short_period(b"aaaa") == 1
    assert short_period(b"abc") is None
    assert short_period(b"aba") is None
    for x in (b"abaab", b"aabaab" * 3, b"a", b"ab" * 7 + b"a"):
        p = oracle.period(x)
        assert short_period(x) == (p if 2 * p <= len(x) else None)


def test_relevant_close_examples():
    occ, ci = broad_index(abac())
    h1, h2 = CoPatternHandle(ci, b"ab"), CoPatternHandle(ci, b"ac")
    assert relevant_close_co_occurrences(ci, h1, h2, 5, 2) == [(0, 2)]
    assert relevant_close_co_occurrences(ci, h1, h2, 5, 1) == []
    _, cx = broad_index(x3())
    assert relevant_close_co_occurrences(cx, CoPatternHandle(cx, b"a"),
                                         CoPatternHandle(cx, b"b"), 2, 1) == [(0, 1)]


def test_report_from_anchors_examples():
    _, ci = broad_index(x4())
    assert report_from_anchors(ci, [(2, [(0, 1)])], 1, 1) == [(0, 1), (2, 3)]
    assert report_from_anchors(ci, [(3, [(1, 2)])], 1, 1) == [(1, 2)]
    _, cr = broad_index(run3())
    assert report_from_anchors(cr, [(3, [(1, 2)])], 1, 1) == [(1, 2), (3, 4)]


def test_query_examples(example):
    _, _, _, ci = example
    assert query_close(ci, b"ab", b"ac", 2) == [(3, 5)]
    assert query_close(ci, b"ab", b"ac", 1) == []
    assert query_close(ci, b"a", b"c", 2) == [(5, 6), (7, 8), (9, 11)]
    assert query_close(ci, b"zz", b"a", 5) == []
    with pytest.raises(EmptyPattern):
        query_close(ci, b"", b"a", 1)
    with pytest.raises(NegativeBound):
        query_close(ci, b"a", b"b", -1)


def test_second_pattern_inside_first():
    g, _, ci = text_index(EXAMPLE)
    assert query_close(ci, b"aba", b"ba", 1) == [(q, q + 1) for q in oracle.naive_occurrences(EXAMPLE, b"aba")]
    assert query_close(ci, b"aba", b"ba", 0) == []
    assert query_close(ci, b"ab", b"ab", 0) == [(q, q) for q in (1, 3, 9)]


def _rules_with_close_relevant(g, p1, p2, b):
    return {a for a in range(g.size)
            if any(q2 - q1 <= b for q1, q2 in oracle.naive_relevant_co_occurrences(g, a, p1, p2))}


@pytest.mark.parametrize("seed", range(10))
def test_candidates_superset_and_sound(seed):
    rng = random.Random(seed)
    for text in random_texts(seed, 4, 120, 3):
        g, occ, ci = text_index(text, seed)
        for _ in range(6):
            pats = []
            for _ in range(2):
                i = rng.randrange(len(text))
                pats.append(text[i:i + rng.randint(2, 6)])
            p1, p2 = pats
            if p2 in p1:
                continue
            b = rng.choice([0, 1, 2, 5, len(text)])
            h1, h2 = CoPatternHandle(ci, p1), CoPatternHandle(ci, p2)
            cands = set(candidate_nonterminals(ci, h1, h2, b))
            assert _rules_with_close_relevant(g, p1, p2, b) <= cands
            if min(len(p1), len(p2)) < 2:
                continue                   # single characters use the rule scan
            for a in cands:
                assert oracle.has_close_pair(g.expand(a), p1, p2, b)


@pytest.mark.parametrize("seed", range(15))
def test_query_matches_oracle(seed):
    rng = random.Random(1000 + seed)
    for text in random_texts(seed, 4, 300):
        _, _, ci = text_index(text, seed)
        for _ in range(8):
            pats = []
            for _ in range(2):
                if rng.random() < 0.8:
                    i = rng.randrange(len(text))
                    pats.append(text[i:i + rng.randint(1, 8)])
                else:
                    pats.append(bytes(rng.choice(b"abcd") for _ in range(rng.randint(1, 3))))
            for b in (0, 1, 2, 5, len(text)):
                stats = {"duplicates": 0}
                got = query_close(ci, *pats, b, debug=True, stats=stats)
                assert got == oracle.naive_b_close(text, *pats, b)
                assert stats["duplicates"] == 0


def test_eager_mode_and_cap():
    g = x4()
    occ = build_occ_index(g, LevelScheme(), split_mode="broad")
    ci = build_co_index(occ, eager=True)
    assert ci.stats["quadruples"] > 0
    assert query_close(ci, b"a", b"b", 1) == [(0, 1), (2, 3)]
    big, _, _ = text_index(EXAMPLE * 20)
    occ2 = build_occ_index(big, LevelScheme(), split_mode="broad")
    with pytest.raises(EagerTooLarge):
        build_co_index(occ2, eager=True, cap=10)
