import math
import random

from hypothesis import given, settings, strategies as st

from cooc.corpora import fibonacci_slp
from cooc.fingerprint import GrammarFingerprints, random_params
from cooc.trie import EntryView, TrieEntry, audit_trie, batch_locus, build_trie

from conftest import grammar_of_strings


def trie_of(strings, power=None, seed=0):
    g, syms = grammar_of_strings(strings, power)
    view = EntryView(g, GrammarFingerprints(g, random_params(random.Random(seed))))
    entries = [TrieEntry(syms[s]) for s in strings]
    return build_trie(view, entries), g, syms


def sorted_strings(t):
    return [t.view.materialize(e) for e in t.sorted_entries]


def brute_locus(strs, q):
    hits = [r for r, s in enumerate(strs) if s.startswith(q)]
    return (hits[0], hits[-1] + 1) if hits else None


def test_sorted_order_example():
    t, _, _ = trie_of([b"b", b"abab", b"ab"])
    assert sorted_strings(t) == [b"ab", b"abab", b"b"]
    assert audit_trie(t)


def test_single_entry():
    t, _, _ = trie_of([b"abc"])
    assert len(t) == 1 and t.num_paths == 1
    assert all(h == 0 for h in t.hp)


def test_heavy_path_enters_larger_subtree():
    t, _, _ = trie_of([b"b", b"aaa", b"a", b"aa"])
    a_node = t.locus(b"a").node
    assert t.hp_of(0) == 0 and t.hp_of(a_node) == 0
    assert t.hp_of(t.locus(b"b").node) != 0
    deepest = t.locus(b"aaa").node
    assert t.hp_of(deepest) == 0


def test_locus_examples():
    t, _, _ = trie_of([b"ab", b"ac"])
    loc = batch_locus(t, b"ac", [0])[0]
    assert loc.found and sorted_strings(t)[loc.lo:loc.hi] == [b"ac"]
    miss = batch_locus(t, b"zz", [0])[0]
    assert not miss.found and miss.lo == miss.hi
    empty = batch_locus(t, b"ac", [2])[0]
    assert empty.found and (empty.lo, empty.hi) == (0, 2) and empty.node == 0


def test_example_suffix_locus_of_ab(example):
    _, _, occ, _ = example
    t = occ.t_suf
    loc = batch_locus(t, b"cab", [1])[0]
    strs = sorted_strings(t)
    assert loc.found and loc.depth == 2
    assert strs[loc.lo:loc.hi] == [s for s in strs if s.startswith(b"ab")]
    pre = occ.t_pre.locus(b"c")
    assert pre.found and pre.depth == 2         # the "ca" node


def test_heavy_path_switches_bounded():
    rng = random.Random(3)
    for _ in range(30):
        strs = list({bytes(rng.choice(b"ab") for _ in range(rng.randint(1, 9)))
                     for _ in range(rng.randint(1, 40))})
        t, _, _ = trie_of(strs)
        bound = math.ceil(math.log2(len(t))) + 1 if len(t) > 1 else 1
        for r in range(len(t)):
            assert len(t.leaf_path(r)) <= bound


@settings(max_examples=60, deadline=None)
@given(st.lists(st.binary(min_size=1, max_size=8).map(lambda s: bytes(b"ab"[c % 2] for c in s)),
                min_size=1, max_size=25, unique=True),
       st.binary(max_size=6).map(lambda s: bytes(b"abc"[c % 3] for c in s)))
def test_intervals_match_brute_force(strs, q):
    t, _, _ = trie_of(strs)
    ss = sorted_strings(t)
    assert ss == sorted(strs) and audit_trie(t)
    loc = t.locus(q)
    want = brute_locus(ss, q)
    assert (loc.lo, loc.hi) == want if want else not loc.found
    if loc.found:
        # the node interval is exactly the entries prefixed by its label
        lab = t.label(loc.node)
        assert len(lab) >= len(q) and lab.startswith(q)
        assert brute_locus(ss, lab) == t.interval(loc.node)


def test_long_labels_use_fingerprints():
    g = fibonacci_slp(5000)
    view = EntryView(g, GrammarFingerprints(g, random_params(random.Random(9))))
    entries = [TrieEntry(a, 1, rev) for a in range(g.size) for rev in (False, True)]
    entries += [TrieEntry(a, 2) for a in range(g.size) if g.exp_len[a] > 30]
    t = build_trie(view, entries)
    assert audit_trie(t)
    ss = sorted_strings(t)
    text = g.expand()
    rng = random.Random(1)
    for _ in range(200):
        i = rng.randrange(len(text))
        q = text[i:i + rng.choice([1, 10, 65, 200, 3000])]
        if rng.random() < 0.3:
            q = q[:-1] + b"z"
        off = rng.randrange(len(q))
        loc = batch_locus(t, q, [off])[0]
        want = brute_locus(ss, q[off:])
        assert ((loc.lo, loc.hi) == want) if want else not loc.found
