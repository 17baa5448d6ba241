"""Occurrence queries inside non-terminals of an RLSLP.

Two compact tries index every rule: ``T_pre`` holds the reversed head
expansion and ``T_suf`` the tail expansion (``<C>`` for ``A -> BC``,
``<B>^(k-1)`` for ``A -> B^k``).  A pattern split ``s`` is relevant in ``A``
exactly when A's entry sits inside the locus interval of ``rev(P[:s])`` in
``T_pre`` and of ``P[s:]`` in ``T_suf``.

Emptiness ("does P occur in <A>?") is answered by the point store: for each
rule ``A`` and pair of heavy paths, a staircase over the depths at which the
root paths of descendants of ``A`` leave those heavy paths.

Extremal and predecessor/successor queries recurse down the grammar.  They
read a per-pattern profile (occurs / leftmost / rightmost for every rule)
that is filled bottom-up once per pattern.

All positions are 0-based and local to the expansion being queried.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from typing import NamedTuple

import numpy as np

from .compress import LevelScheme, NoOccurrenceCertificate, SplitSet, compute_splits
from .errors import EmptyPattern, IndexFormatError, OutOfBounds
from .fingerprint import FingerprintParams, GrammarFingerprints, random_params
from .grammar import Grammar, Leaf, Pair
from .range import Staircase, build_staircase, dominant_exists
from .trie import (CompactTrie, EntryView, Locus, TrieEntry,
                   audit_trie, batch_locus, build_trie)

AUDIT_CAP = 1 << 22
PARAM_RETRIES = 8
# base points <= C_P * g' * (log2 g' + 1)**2, measured worst ratio about 0.13
C_P = 1


class Profile(NamedTuple):
    occ: list          # bool per rule
    lm: list           # leftmost occurrence per rule, -1 if none
    rm: list           # rightmost occurrence per rule, -1 if none
    rel: dict          # rule -> ascending relevant occurrences
    tlm: list          # leftmost occurrence starting in the tail, -1 if none


class PatternHandle:
    """A preprocessed pattern: split set plus trie loci per split."""

    def __init__(self, idx: "OccIndex", pattern: bytes, splits: SplitSet,
                 loci_pre: list[Locus], loci_suf: list[Locus]):
        self.idx = idx
        self.pattern = pattern
        self.m = len(pattern)
        self.splits = splits
        self.loci_pre = loci_pre
        self.loci_suf = loci_suf
        self._profile: Profile | None = None

    @property
    def profile(self) -> Profile:
        if self._profile is None:
            self._profile = _build_profile(self.idx, self)
        return self._profile

    def live_splits(self):
        """(s, u, v) for splits whose two loci exist."""
        for s, u, v in zip(self.splits.splits, self.loci_pre, self.loci_suf):
            if u.found and v.found:
                yield s, u, v

    def __repr__(self) -> str:
        return f"PatternHandle({self.pattern!r}, splits={self.splits.splits})"


class OccIndex:
    def __init__(self, g: Grammar, scheme: LevelScheme, params: FingerprintParams,
                 split_mode: str = "fast", audit: bool = True, tables: dict | None = None):
        self.g = g
        self.scheme = scheme
        self.params = params
        self.split_mode = split_mode
        self.fps = GrammarFingerprints(g, params)
        self.view = EntryView(g, self.fps)
        prods = g.productions
        self.rules = [a for a in range(g.size) if type(prods[a]) is not Leaf]
        pre_entries, suf_entries = [], []
        for a in self.rules:
            p = prods[a]
            pre_entries.append(TrieEntry(p[0], 1, True))
            if type(p) is Pair:
                suf_entries.append(TrieEntry(p.right, 1, False))
            else:
                suf_entries.append(TrieEntry(p.base, p.exponent - 1, False))
        if tables is not None:
            self.t_pre = _restore_trie(self.view, pre_entries, tables["trie_pre"])
            self.t_suf = _restore_trie(self.view, suf_entries, tables["trie_suf"])
        else:
            self.t_pre = build_trie(self.view, pre_entries)
            self.t_suf = build_trie(self.view, suf_entries)
        self.audited = False
        if tables is not None:
            self.audited = bool(tables["audited"])
        elif audit and _audit_size(self.t_pre) + _audit_size(self.t_suf) <= AUDIT_CAP:
            if not (audit_trie(self.t_pre) and audit_trie(self.t_suf)):
                raise _Collision()
            self.audited = True
        size = g.size
        self.rank_pre = np.full(size, -1, dtype=np.int64)
        self.rank_suf = np.full(size, -1, dtype=np.int64)
        for i, a in enumerate(self.rules):
            self.rank_pre[a] = self.t_pre.rank[i]
            self.rank_suf[a] = self.t_suf.rank[i]
        self.head_len = np.array([g.head_len(a) for a in range(size)], dtype=np.int64)
        self._rank_pre_l = self.rank_pre.tolist()
        self._rank_suf_l = self.rank_suf.tolist()
        if tables is not None:
            self._restore_points(tables)
            return
        # base points: own heavy-path pairs of every rule
        self.base_points: dict[int, list[tuple[int, int, int, int]]] = {}
        for a in self.rules:
            pp = [(h, self.t_pre.node_depth[n]) for h, n in self.t_pre.leaf_path(self._rank_pre_l[a])]
            sp = [(h, self.t_suf.node_depth[n]) for h, n in self.t_suf.leaf_path(self._rank_suf_l[a])]
            self.base_points[a] = [(hu, hv, du, dv) for hu, du in pp for hv, dv in sp]
        # descendants (reflexive) as int bitsets, and byte sets for m = 1
        self.desc = [0] * size
        self.chars = [0] * size
        for a in g.order:
            p = prods[a]
            if type(p) is Leaf:
                self.desc[a] = 1 << a
                self.chars[a] = 1 << p.ch
            elif type(p) is Pair:
                self.desc[a] = (1 << a) | self.desc[p.left] | self.desc[p.right]
                self.chars[a] = self.chars[p.left] | self.chars[p.right]
            else:
                self.desc[a] = (1 << a) | self.desc[p.base]
                self.chars[a] = self.chars[p.base]
        self._stores: dict[int, dict[tuple[int, int], Staircase]] = {}

    # --- serialization ------------------------------------------------
    def to_tables(self) -> dict:
        """JSON-ready tables: tries, base points, descendant sets, built staircases."""
        return {
            "audited": self.audited,
            "split_mode": self.split_mode,
            "trie_pre": _trie_table(self.t_pre),
            "trie_suf": _trie_table(self.t_suf),
            "base_points": [[a, [list(t) for t in self.base_points[a]]] for a in self.rules],
            "desc": [format(x, "x") for x in self.desc],
            "chars": [format(x, "x") for x in self.chars],
            "stores": [[a, [[hu, hv, st.xs, st.ys] for (hu, hv), st in sorted(self._stores[a].items())]]
                       for a in sorted(self._stores)],
        }

    def _restore_points(self, tables: dict) -> None:
        self.base_points = {a: [tuple(t) for t in pts] for a, pts in tables["base_points"]}
        self.desc = [int(x, 16) for x in tables["desc"]]
        self.chars = [int(x, 16) for x in tables["chars"]]
        if len(self.desc) != self.g.size or set(self.base_points) != set(self.rules):
            raise IndexFormatError("point tables do not match the grammar")
        self._stores = {a: {(hu, hv): Staircase(list(xs), list(ys)) for hu, hv, xs, ys in st}
                        for a, st in tables["stores"]}

    # --- point store --------------------------------------------------
    @property
    def num_points(self) -> int:
        """Number of base points (one per rule and heavy-path pair)."""
        return sum(len(v) for v in self.base_points.values())

    @property
    def point_bound(self) -> float:
        gp = self.g.size
        return C_P * gp * (math.log2(gp) + 1) ** 2

    def point_store(self, a: int) -> dict[tuple[int, int], Staircase]:
        store = self._stores.get(a)
        if store is None:
            groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
            bits = self.desc[a]
            while bits:
                low = bits & -bits
                d = low.bit_length() - 1
                bits ^= low
                for hu, hv, du, dv in self.base_points.get(d, ()):
                    groups.setdefault((hu, hv), []).append((du, dv))
            store = {k: build_staircase(v) for k, v in groups.items()}
            self._stores[a] = store
        return store

    def build_all_point_stores(self) -> int:
        """Materialise every staircase; returns the total frontier size."""
        return sum(len(s) for a in self.rules for s in self.point_store(a).values())

    # --- helpers ------------------------------------------------------
    def in_pre(self, a: int, u: Locus) -> bool:
        r = self._rank_pre_l[a]
        return u.lo <= r < u.hi

    def in_suf(self, a: int, v: Locus) -> bool:
        r = self._rank_suf_l[a]
        return v.lo <= r < v.hi


class _Collision(Exception):
    pass


def _trie_table(t: CompactTrie) -> dict:
    return {"entries": [[e.symbol, e.count, int(e.reversed)] for e in t.entries],
            "order": list(t.order), "lcp": list(t.lcp)}


def _restore_trie(view: EntryView, entries: list[TrieEntry], table: dict) -> CompactTrie:
    stored = [TrieEntry(a, k, bool(r)) for a, k, r in table["entries"]]
    if stored != list(entries):
        raise IndexFormatError("trie entries do not match the grammar")
    order, lcp = list(table["order"]), list(table["lcp"])
    if sorted(order) != list(range(len(entries))) or len(lcp) != len(order):
        raise IndexFormatError("malformed trie table")
    return CompactTrie(view, entries, order, lcp)


def _audit_size(t: CompactTrie) -> int:
    return sum(t.lengths)


def build_occ_index(g: Grammar, scheme: LevelScheme, params: FingerprintParams | None = None,
                    seed: int = 0, split_mode: str = "fast", audit: bool = True) -> OccIndex:
    """Build the index; redraws ``r`` if the trie audit spots a collision."""
    rng = random.Random(seed)
    for _ in range(PARAM_RETRIES):
        if params is None:
            params = random_params(rng)
        try:
            return OccIndex(g, scheme, params, split_mode, audit)
        except _Collision:
            params = None
    from .errors import ParamSearchExhausted
    raise ParamSearchExhausted("fingerprint collisions in every attempt")


# ----------------------------------------------------------------------
# pattern preprocessing


def preprocess_pattern(idx: OccIndex, pattern: bytes, mode: str | None = None, fps=None):
    """Handle for ``pattern``, or a certificate that it occurs nowhere.

    ``fps`` may hold substring fingerprints of the pattern and of its reverse.
    """
    pattern = bytes(pattern)
    if not pattern:
        raise EmptyPattern("pattern must be non-empty")
    res = compute_splits(idx.g, idx.scheme, pattern, mode or idx.split_mode)
    if isinstance(res, NoOccurrenceCertificate):
        return res
    return handle_from_splits(idx, pattern, res, fps)


def handle_from_splits(idx: OccIndex, pattern: bytes, splits: SplitSet, fps=None) -> PatternHandle:
    m = len(pattern)
    pfp, rpfp = fps or (None, None)
    rpat = pattern[::-1]
    loci_pre = batch_locus(idx.t_pre, rpat, [m - s for s in splits.splits], rpfp)
    loci_suf = batch_locus(idx.t_suf, pattern, list(splits.splits), pfp)
    return PatternHandle(idx, pattern, splits, loci_pre, loci_suf)


def _build_profile(idx: OccIndex, h: PatternHandle) -> Profile:
    g = idx.g
    size = g.size
    m = h.m
    prods = g.productions
    lens = g.exp_len
    rel: dict[int, list[int]] = {}
    if m >= 2:
        rp, rs = idx.rank_pre, idx.rank_suf
        # descending s gives ascending q
        for s, u, v in sorted(h.live_splits(), key=lambda t: -t[0]):
            mask = (rp >= u.lo) & (rp < u.hi) & (rs >= v.lo) & (rs < v.hi)
            for a in np.flatnonzero(mask).tolist():
                rel.setdefault(a, []).append(int(idx.head_len[a]) - s)
    occ = [False] * size
    lm = [-1] * size
    rm = [-1] * size
    tlm = [-1] * size
    c0 = h.pattern[0]
    for a in g.order:
        p = prods[a]
        r = rel.get(a)
        if type(p) is Leaf:
            if m == 1 and p.ch == c0:
                occ[a] = True
                lm[a] = rm[a] = 0
            continue
        if type(p) is Pair:
            b, c = p
            hl = lens[b]
            if occ[b]:
                lm[a] = lm[b]
            elif r:
                lm[a] = r[0]
            elif occ[c]:
                lm[a] = hl + lm[c]
            if occ[c]:
                rm[a] = hl + rm[c]
            elif r:
                rm[a] = r[-1]
            elif occ[b]:
                rm[a] = rm[b]
            if occ[c]:
                tlm[a] = hl + lm[c]
        else:
            b, k = p
            bl = lens[b]
            if occ[b]:
                lm[a] = lm[b]
            elif r:
                lm[a] = r[0]
            best = (k - 1) * bl + rm[b] if occ[b] else -1
            first = bl + lm[b] if occ[b] else -1
            if r:
                total = k * bl
                for q in r:
                    best = max(best, q + (total - m - q) // bl * bl)
                    if q + bl + m <= total and (first < 0 or q + bl < first):
                        first = q + bl
            rm[a] = best
            tlm[a] = first
        occ[a] = lm[a] >= 0
    return Profile(occ, lm, rm, rel, tlm)


# ----------------------------------------------------------------------
# queries


def relevant_occurrences(idx: OccIndex, h: PatternHandle, a: int) -> list[int]:
    if isinstance(h, NoOccurrenceCertificate) or h.m < 2:
        return []
    if type(idx.g.productions[a]) is Leaf:
        return []
    hl = idx.g.head_len(a)
    out = [hl - s for s, u, v in h.live_splits() if idx.in_pre(a, u) and idx.in_suf(a, v)]
    out.sort()
    return out


def occurs_in(idx: OccIndex, h: PatternHandle, a: int) -> bool:
    if isinstance(h, NoOccurrenceCertificate):
        return False
    if h.m == 1:
        return bool(idx.chars[a] >> h.pattern[0] & 1)
    if type(idx.g.productions[a]) is Leaf:
        return False
    store = idx.point_store(a)
    tp, ts = idx.t_pre, idx.t_suf
    for _, u, v in h.live_splits():
        st = store.get((tp.hp[u.node], ts.hp[v.node]))
        if st is not None and dominant_exists(st, u.depth, v.depth):
            return True
    return False


def extremal(idx: OccIndex, h: PatternHandle, a: int, which: str = "leftmost",
             part: str = "whole"):
    if isinstance(h, NoOccurrenceCertificate):
        return None
    if which not in ("leftmost", "rightmost"):
        raise ValueError(f"which must be 'leftmost' or 'rightmost', not {which!r}")
    pf = h.profile
    g = idx.g
    if part == "whole":
        val = pf.lm[a] if which == "leftmost" else pf.rm[a]
        return val if val >= 0 else None
    p = g.productions[a]
    if type(p) is Leaf:
        if part == "head":
            return extremal(idx, h, a, which, "whole")
        return None
    hl = g.exp_len[p[0]]
    if part == "head":
        return extremal(idx, h, p[0], which, "whole")
    if part != "tail":
        raise ValueError(f"part must be 'whole', 'head' or 'tail', not {part!r}")
    if which == "leftmost":
        t = pf.tlm[a]
        return t if t >= 0 else None
    r = pf.rm[a]
    return r if r >= hl else None


def pred_succ(idx: OccIndex, h: PatternHandle, a: int, p: int, direction: str = "pred"):
    if isinstance(h, NoOccurrenceCertificate):
        return None
    if p < 0 or p >= idx.g.exp_len[a]:
        raise OutOfBounds(f"position {p} outside [0, {idx.g.exp_len[a]})")
    if direction == "pred":
        return _pred(idx.g, h.profile, h.m, a, p)
    if direction == "succ":
        return _succ(idx.g, h.profile, h.m, a, p)
    raise ValueError(f"direction must be 'pred' or 'succ', not {direction!r}")


def _pred(g: Grammar, pf: Profile, m: int, a: int, p: int):
    """Rightmost occurrence q <= p in <a>, or None."""
    occ, lm, rm, rel = pf[:4]
    prods, lens = g.productions, g.exp_len
    base = 0
    while True:
        if not occ[a] or p < lm[a]:
            return None
        if p >= rm[a]:
            return base + rm[a]
        pr = prods[a]
        if type(pr) is Pair:
            b, c = pr
            hl = lens[b]
            if p >= hl and occ[c] and p - hl >= lm[c]:
                base += hl
                p -= hl
                a = c
                continue
            # relevant occurrences all lie to the right of those inside the head
            r = rel.get(a)
            if r:
                i = bisect_right(r, p)
                if i:
                    return base + r[i - 1]
            a = b
            p = min(p, hl - 1)
            continue
        if type(pr) is Leaf:
            return base      # m == 1 and occ[a]
        b, k = pr
        bl = lens[b]
        best = -1
        r = rel.get(a)
        if r:
            total = k * bl
            for q in r:
                if q > p:
                    break
                i = min((total - m - q) // bl, (p - q) // bl)
                best = max(best, q + i * bl)
        if occ[b]:
            cpy = p // bl
            off = p - cpy * bl
            if off >= lm[b]:
                sub = _pred(g, pf, m, b, off)
                best = max(best, cpy * bl + sub)
            elif cpy:
                best = max(best, (cpy - 1) * bl + rm[b])
        return base + best if best >= 0 else None


def _succ(g: Grammar, pf: Profile, m: int, a: int, p: int):
    """Leftmost occurrence q >= p in <a>, or None."""
    occ, lm, rm, rel = pf[:4]
    prods, lens = g.productions, g.exp_len
    base = 0
    while True:
        if not occ[a] or p > rm[a]:
            return None
        if p <= lm[a]:
            return base + lm[a]
        pr = prods[a]
        if type(pr) is Pair:
            b, c = pr
            hl = lens[b]
            if p < hl and occ[b] and p <= rm[b]:
                a = b
                continue
            r = rel.get(a)
            if r:
                i = bisect_left(r, p)
                if i < len(r):
                    return base + r[i]
            base += hl
            p = max(0, p - hl)
            a = c
            continue
        if type(pr) is Leaf:
            return None      # p > 0 = lm
        b, k = pr
        bl = lens[b]
        best = None
        r = rel.get(a)
        if r:
            total = k * bl
            for q in r:
                i = max(0, -((q - p) // bl))
                if i <= (total - m - q) // bl:
                    cand = q + i * bl
                    if best is None or cand < best:
                        best = cand
        if occ[b]:
            cpy = p // bl
            off = p - cpy * bl
            if off <= rm[b]:
                sub = _succ(g, pf, m, b, off)
                cand = cpy * bl + sub
            elif cpy + 1 < k:
                cand = (cpy + 1) * bl + lm[b]
            else:
                cand = None
            if cand is not None and (best is None or cand < best):
                best = cand
        return base + best if best is not None else None


def report_co_occurrences(idx: OccIndex, h1, h2, a: int | None = None) -> list[tuple[int, int]]:
    """All co-occurrences of (P1, P2) in <a> (default: the whole text)."""
    if isinstance(h1, NoOccurrenceCertificate) or isinstance(h2, NoOccurrenceCertificate):
        return []
    g = idx.g
    if a is None:
        a = g.start
    n = g.exp_len[a]
    out = []
    i = 0
    while i < n:
        q1 = pred_succ(idx, h1, a, i, "succ")
        if q1 is None:
            break
        q2 = pred_succ(idx, h2, a, q1, "succ")
        if q2 is None:
            break
        q1 = pred_succ(idx, h1, a, q2, "pred")
        out.append((q1, q2))
        i = q2 + 1
    return out
