"""Reporting b-close co-occurrences of two patterns in a grammar-compressed text.

Pipeline for a query ``(P1, P2, b)`` when P2 is not a substring of P1:

1. For every pair of splits, extend each pattern to its *anchor*
   ``S_j = rev(U_j) V_j``, with U_j and V_j the labels of the pattern's loci in
   the anchor tries.  A quadruple record for the four loci says which rules
   contain anchor occurrences at distances that could be b-close.  Records are
   built on first use and memoised.
2. In each candidate rule, list the relevant co-occurrences and keep the
   b-close ones.
3. Spread those over every occurrence of the rule in the parse tree by walking
   the pruned parse tree.

When P2 occurs inside P1 at offset f, the answer is simply ``(q, q + f)`` for
every occurrence q of P1, provided ``f <= b``.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

import numpy as np

from .compress import NoOccurrenceCertificate
from .errors import EagerTooLarge, EmptyPattern, IndexFormatError, NegativeBound
from .grammar import Grammar, Leaf, Pair
from .occindex import (OccIndex, PatternHandle, Profile, _pred, _restore_trie, _succ, _trie_table,
                       preprocess_pattern)
from .trie import ConcatFingerprints, Locus, PatternFingerprints, TrieEntry, batch_locus, build_trie

EAGER_CAP = 20000


# ----------------------------------------------------------------------
# pruned parse tree


class PrunedParseTree:
    """Parse tree where only the first node (preorder) of each label keeps
    its children and a run ``B^k`` keeps only its first child.

    Node arrays: ``label`` (-1 for the collapsed ``B^(k-1)`` leaf), ``off``,
    ``parent``, ``nxt`` (next node with the same label in preorder),
    ``anc`` and ``run_first`` (number of copies if the node is the first child
    of a run rule, else 0).
    """

    def __init__(self, g: Grammar):
        self.g = g
        label, off, parent, run_first = [], [], [], []
        count: dict[int, int] = {}
        expanded: set[int] = set()
        prods, lens = g.productions, g.exp_len
        stack = [(g.start, 0, -1, 0)]
        order = []
        while stack:
            a, o, par, rf = stack.pop()
            v = len(label)
            label.append(a)
            off.append(o)
            parent.append(par)
            run_first.append(rf)
            order.append(v)
            if a < 0:
                continue
            count[a] = count.get(a, 0) + 1
            if a in expanded:
                continue
            expanded.add(a)
            p = prods[a]
            if type(p) is Leaf:
                continue
            if type(p) is Pair:
                stack.append((p.right, o + lens[p.left], v, 0))
                stack.append((p.left, o, v, 0))
            else:
                stack.append((-1, o + lens[p.base], v, 0))
                stack.append((p.base, o, v, p.exponent))
        self.label, self.off, self.parent, self.run_first = label, off, parent, run_first
        # nodes were numbered in preorder, so "next" is the following node with the label
        nxt = [-1] * len(label)
        last: dict[int, int] = {}
        for v in range(len(label) - 1, -1, -1):
            a = label[v]
            if a >= 0:
                nxt[v] = last.get(a, -1)
                last[a] = v
        self.nxt = nxt
        anc = [-1] * len(label)
        for v in range(1, len(label)):
            u = parent[v]
            while True:
                if u == 0 or count.get(label[u], 0) > 1 or run_first[u]:
                    break
                u = parent[u]
            anc[v] = u
        self.anc = anc
        self._index_labels()

    def _index_labels(self) -> None:
        lens = self.g.exp_len
        label = self.label
        self.first_node = {}
        for v, a in enumerate(label):
            if a >= 0 and a not in self.first_node:
                self.first_node[a] = v
        # nxt keeps the label and moves forward, anc moves to a longer label,
        # so (label length, preorder) orders every propagation step
        key = sorted((lens[a] if a >= 0 else 0, v) for v, a in enumerate(label))
        self.rank = [0] * len(label)
        for r, (_, v) in enumerate(key):
            self.rank[v] = r
        self.by_rank = [v for _, v in key]

    def to_table(self) -> dict:
        return {k: list(getattr(self, k)) for k in self._FIELDS}

    _FIELDS = ("label", "off", "parent", "run_first", "nxt", "anc")

    @classmethod
    def from_table(cls, g: Grammar, d: dict) -> "PrunedParseTree":
        t = cls.__new__(cls)
        t.g = g
        try:
            for k in cls._FIELDS:
                setattr(t, k, [int(x) for x in d[k]])
        except (KeyError, TypeError, ValueError) as e:
            raise IndexFormatError(f"bad pruned tree table: {e}") from None
        n = len(t.label)
        if n == 0 or any(len(getattr(t, k)) != n for k in cls._FIELDS) or t.label[0] != g.start:
            raise IndexFormatError("pruned tree does not match the grammar")
        if any(a >= g.size for a in t.label):
            raise IndexFormatError("pruned tree label out of range")
        t._index_labels()
        return t

    def __len__(self) -> int:
        return len(self.label)


def report_from_anchors(ci: "CoIndex", anchors, m1: int, m2: int, stats: dict | None = None):
    """Spread per-rule co-occurrences over the whole parse tree.

    ``anchors`` holds ``(A, [(q1, q2), ...])`` in coordinates local to ``<A>``.
    Sets ``W`` are kept in text coordinates of the current node.
    """
    t = ci.tree
    g = ci.g
    lens = g.exp_len
    prods = g.productions
    heap: list = []
    seq = 0
    for a, pairs in anchors:
        v = t.first_node.get(a)
        if v is None or not pairs:
            continue
        q1 = np.array([p[0] for p in pairs], dtype=np.int64)
        q2 = np.array([p[1] for p in pairs], dtype=np.int64)
        p = prods[a]
        if type(p) is not Leaf and type(p) is not Pair:
            bl = lens[p.base]
            end = np.maximum(q1 + m1, q2 + m2)
            reps = (lens[a] - end) // bl
            idx = np.repeat(np.arange(len(q1)), reps + 1)
            shift = (np.arange(len(idx)) - np.repeat(np.cumsum(reps + 1) - (reps + 1), reps + 1)) * bl
            q1, q2 = q1[idx] + shift, q2[idx] + shift
        heapq.heappush(heap, (v, seq, q1 + t.off[v], q2 + t.off[v]))
        seq += 1
    pending: dict[int, list] = {}
    ranks: list[int] = []

    def push(u, w1, w2):
        lst = pending.get(u)
        if lst is None:
            pending[u] = lst = []
            heapq.heappush(ranks, t.rank[u])
        lst.append((w1, w2))

    for v, _, w1, w2 in heap:
        push(v, w1, w2)
    out1: list = []
    out2: list = []
    while ranks:
        v = t.by_rank[heapq.heappop(ranks)]
        items = pending.pop(v)
        if len(items) == 1:
            w1, w2 = items[0]
        else:
            w1 = np.concatenate([x for x, _ in items])
            w2 = np.concatenate([y for _, y in items])
        if v == 0:
            out1.append(w1)
            out2.append(w2)
            continue
        nv = t.nxt[v]
        if nv >= 0:
            d = t.off[nv] - t.off[v]
            push(nv, w1 + d, w2 + d)
        k = t.run_first[v]
        if k:
            bl = lens[t.label[v]]
            par = t.parent[v]
            limit = t.off[par] + lens[t.label[par]]
            shifts = np.arange(k, dtype=np.int64) * bl
            n1 = (w1[None, :] + shifts[:, None]).ravel()
            n2 = (w2[None, :] + shifts[:, None]).ravel()
            keep = np.maximum(n1 + m1, n2 + m2) <= limit
            w1, w2 = n1[keep], n2[keep]
        if len(w1):
            push(t.anc[v], w1, w2)
    if not out1:
        return []
    a1 = np.concatenate(out1)
    a2 = np.concatenate(out2)
    codes = np.unique(a1 * (g.n + 1) + a2)
    if stats is not None:
        stats["duplicates"] = stats.get("duplicates", 0) + len(a1) - len(codes)
    q1, q2 = np.divmod(codes, g.n + 1)
    return list(zip(q1.tolist(), q2.tolist()))


# ----------------------------------------------------------------------
# anchors and quadruple records


def short_period(x: bytes) -> int | None:
    """Smallest period of x when it is at most |x|/2, else None."""
    n = len(x)
    half = n // 2
    if half == 0:
        return None
    head = x[:n - half]
    # any period p <= n/2 puts an occurrence of the head at p
    i = x.find(head, 1)
    while i != -1 and i <= half:
        if x[i:] == x[:n - i]:
            return i
        i = x.find(head, i + 1)
    return None


@dataclass
class Anchor:
    key: tuple[int, int]
    text: bytes
    l: int
    handle: PatternHandle | None      # None when the anchor occurs nowhere
    occ_rel_split: dict = field(default_factory=dict)   # rule -> True if relevant with split l
    _pi: object = field(default=False, repr=False)

    @property
    def short_period(self) -> int | None:
        if self._pi is False:
            self._pi = short_period(self.text)
        return self._pi

    @property
    def profile(self) -> Profile | None:
        return None if self.handle is None else self.handle.profile

    def relevant_at(self, a: int, hl: int):
        """Position of the relevant occurrence with split ``l`` in rule a, or None."""
        pf = self.profile
        if pf is None:
            return None
        r = pf.rel.get(a)
        q = hl - self.l
        if r and q in r:
            return q
        return None


def _record_to_json(rec: "QuadrupleRecord") -> dict:
    return {"key": list(rec.key), "l1": rec.l1, "l2": rec.l2, "n1": rec.n1, "n2": rec.n2,
            "t1": [list(x) for x in rec.t1], "l_ref": list(rec.l_ref),
            "triples": [[k, list(v)] for k, v in sorted(rec.triples.items())],
            "pi1": rec.pi1, "t2": [list(x) for x in rec.t2], "ov": rec.ov,
            "ov_conflicts": rec.ov_conflicts}


def _record_from_json(d: dict) -> "QuadrupleRecord":
    try:
        return QuadrupleRecord(tuple(d["key"]), d["l1"], d["l2"], d["n1"], d["n2"],
                               [tuple(x) for x in d["t1"]], list(d["l_ref"]),
                               {k: tuple(v) for k, v in d["triples"]}, d["pi1"],
                               [tuple(x) for x in d["t2"]], d["ov"], d["ov_conflicts"])
    except (KeyError, TypeError, ValueError) as e:
        raise IndexFormatError(f"bad quadruple record: {e}") from None


@dataclass
class QuadrupleRecord:
    key: tuple[int, int, int, int]
    l1: int
    l2: int
    n1: int
    n2: int
    t1: list = field(default_factory=list)       # sorted (d, rule)
    l_ref: list = field(default_factory=list)    # rules with S2 relevant at split l2
    triples: dict = field(default_factory=dict)  # k -> (p1, p1', p1'')
    pi1: int | None = None
    t2: list = field(default_factory=list)       # sorted (q, rule)
    ov: int | None = None
    ov_conflicts: int = 0


class CoPatternHandle:
    """A pattern with its occindex handle and anchor-trie loci per split."""

    def __init__(self, ci: "CoIndex", pattern: bytes):
        self.pattern = bytes(pattern)
        self.m = len(self.pattern)
        self.occ = preprocess_pattern(ci.occ, self.pattern)
        self.anchor_loci: list[tuple[int, Locus, Locus]] = []
        if isinstance(self.occ, NoOccurrenceCertificate):
            return
        splits = self.occ.splits.splits
        m = self.m
        rpat = self.pattern[::-1]
        pre = batch_locus(ci.t_pre, rpat, [m - s for s in splits])
        suf = batch_locus(ci.t_suf, self.pattern, list(splits))
        self.anchor_loci = [(s, u, v) for s, u, v in zip(splits, pre, suf) if u.found and v.found]

    @property
    def absent(self) -> bool:
        return isinstance(self.occ, NoOccurrenceCertificate)


class CoIndex:
    def __init__(self, occ: OccIndex, tables: dict | None = None):
        self.occ = occ
        self.g = occ.g
        g = self.g
        prods = g.productions
        pre, suf = set(), set()
        for a in occ.rules:
            p = prods[a]
            if type(p) is Pair:
                suf.add(TrieEntry(p.right, 1, False))
                pre.add(TrieEntry(p.left, 1, True))
            else:
                b, k = p
                for j in {1, 2, k - 2, k - 1}:
                    if j >= 1:
                        suf.add(TrieEntry(b, j, False))
                        pre.add(TrieEntry(b, j, True))
        if tables is None:
            self.t_pre = build_trie(occ.view, sorted(pre))
            self.t_suf = build_trie(occ.view, sorted(suf))
            self.tree = PrunedParseTree(g)
        else:
            self.t_pre = _restore_trie(occ.view, sorted(pre), tables["anchor_pre"])
            self.t_suf = _restore_trie(occ.view, sorted(suf), tables["anchor_suf"])
            self.tree = PrunedParseTree.from_table(g, tables["tree"])
        self.logn = max(1, math.ceil(math.log2(max(2, g.n))))
        self._anchors: dict[tuple[int, int], Anchor] = {}
        self._quads: dict[tuple[int, int, int, int], QuadrupleRecord] = {}
        self._label_fp: dict[tuple[str, int], tuple] = {}
        self.stats = {"duplicates": 0, "quadruples": 0, "anchors": 0}
        if tables is not None:
            for d in tables.get("quadruples", ()):
                rec = _record_from_json(d)
                self._quads[rec.key] = rec

    def to_tables(self, with_quadruples: bool = True) -> dict:
        out = {"anchor_pre": _trie_table(self.t_pre), "anchor_suf": _trie_table(self.t_suf),
               "tree": self.tree.to_table()}
        if with_quadruples:
            out["quadruples"] = [_record_to_json(self._quads[k]) for k in sorted(self._quads)]
        return out

    # --- anchors ------------------------------------------------------
    def anchor(self, u: int, v: int) -> Anchor:
        key = (u, v)
        an = self._anchors.get(key)
        if an is None:
            view = self.occ.view
            eu, du = self.t_pre.label_spec(u)
            ev, dv = self.t_suf.label_spec(v)
            lu = view.prefix(eu, du)
            lv = view.prefix(ev, dv)
            text = lu[::-1] + lv
            fu, ru = self._label_fps("pre", u, lu)
            fv, rv = self._label_fps("suf", v, lv)
            params = self.occ.params
            fps = (ConcatFingerprints(params, [ru, fv]), ConcatFingerprints(params, [rv, fu]))
            res = preprocess_pattern(self.occ, text, fps=fps)
            handle = None if isinstance(res, NoOccurrenceCertificate) else res
            an = Anchor(key, text, du, handle)
            self._anchors[key] = an
            self.stats["anchors"] += 1
        return an

    def _label_fps(self, side: str, node: int, label: bytes):
        """Fingerprints of a trie label and of its reverse, shared by all anchors."""
        key = (side, node)
        hit = self._label_fp.get(key)
        if hit is None:
            params = self.occ.params
            hit = (PatternFingerprints(params, label), PatternFingerprints(params, label[::-1]))
            self._label_fp[key] = hit
        return hit

    def quadruple(self, key: tuple[int, int, int, int]) -> QuadrupleRecord:
        rec = self._quads.get(key)
        if rec is None:
            rec = materialize_quadruple(self, key)
            self._quads[key] = rec
            self.stats["quadruples"] += 1
        return rec

    def materialize_all(self, cap: int = EAGER_CAP) -> int:
        """Build every quadruple record; loci of real splits never sit at depth 0."""
        us = [u for u in range(self.t_pre.num_nodes) if self.t_pre.node_depth[u] > 0]
        vs = [v for v in range(self.t_suf.num_nodes) if self.t_suf.node_depth[v] > 0]
        total = (len(us) * len(vs)) ** 2
        if total > cap:
            raise EagerTooLarge(f"{total} quadruples exceed the cap {cap}")
        for u1 in us:
            for u2 in us:
                for v1 in vs:
                    for v2 in vs:
                        self.quadruple((u1, u2, v1, v2))
        return total


def build_co_index(occ: OccIndex, eager: bool = False, cap: int = EAGER_CAP) -> CoIndex:
    ci = CoIndex(occ)
    if eager:
        ci.materialize_all(cap)
    return ci


def _occurrences(text: bytes, pat: bytes) -> list[int]:
    out = []
    i = text.find(pat)
    while i != -1:
        out.append(i)
        i = text.find(pat, i + 1)
    return out


def materialize_quadruple(ci: CoIndex, key) -> QuadrupleRecord:
    u1, u2, v1, v2 = key
    g = ci.g
    a1 = ci.anchor(u1, v1)
    a2 = ci.anchor(u2, v2)
    s1, s2 = a1.text, a2.text
    n1, n2 = len(s1), len(s2)
    rec = QuadrupleRecord(key, a1.l, a2.l, n1, n2)
    rec.pi1 = a1.short_period
    # occurrences of S1 inside S2, and the per-k triples
    occ12 = _occurrences(s2, s1) if n1 <= n2 else []
    for k in range(ci.logn + 1):
        x = a2.l - (1 << k)
        if x < 0:
            rec.triples[k] = (None, None, None)
            continue
        # rightmost with end <= x: start <= x - n1 + 1
        i = bisect_right(occ12, x - n1 + 1)
        p1 = occ12[i - 1] if i else None
        lo = bisect_left(occ12, x - n1 + 1)
        hi = bisect_right(occ12, x)
        p1a = occ12[lo] if lo < hi else None
        p1b = occ12[hi - 1] if lo < hi else None
        rec.triples[k] = (p1, p1a, p1b)
    pf1, pf2 = a1.profile, a2.profile
    if pf1 is None or pf2 is None:
        return rec
    prods = g.productions
    lens = g.exp_len
    hlen = ci.occ.head_len
    t1: list[tuple[int, int]] = []
    t2: list[tuple[int, int]] = []
    # rules where S2 is relevant with split l2
    for a in sorted(pf2.rel):
        hl = int(hlen[a])
        r2 = a2.relevant_at(a, hl)
        if r2 is not None:
            rec.l_ref.append(a)
    l_set = set(rec.l_ref)
    # candidate rules: S1 and S2 both occur and S2 sits in the tail or is relevant
    for a in ci.occ.rules:
        if not pf2.occ[a] or not pf1.occ[a]:
            continue
        hl = lens[prods[a][0]]
        r2 = hl - a2.l if a in l_set else None
        tl2 = pf2.tlm[a]
        if r2 is None and tl2 < 0:
            continue
        r1 = a1.relevant_at(a, hl)
        hr1 = pf1.rm[prods[a][0]]
        if tl2 >= 0:
            if hr1 >= 0:
                t1.append((tl2 - hr1, a))                    # case 1
            if r1 is not None:
                t1.append((tl2 - r1, a))                     # case 2
        if r2 is None:
            continue
        if r1 is not None:
            t1.append((r2 - r1, a))                          # case 3
        if r2 - n1 >= 0:
            p = _pred(g, pf1, n1, a, r2 - n1)
            if p is not None:
                t1.append((r2 - p, a))                       # case 4
        lo = max(0, r2 - n1 + 1)
        hi = min(r2 - 1, r2 + n2 - n1 - 1, hl - n1)
        if lo <= hi:
            p = _succ(g, pf1, n1, a, lo)
            if p is not None and p <= hi:
                t1.append((r2 - p, a))                       # case 5, leftmost
                if p + 1 <= hi:
                    p = _succ(g, pf1, n1, a, p + 1)
                    if p is not None and p <= hi:
                        t1.append((r2 - p, a))               # case 5, second leftmost
        if rec.pi1 is not None:
            lo = max(0, r2 - n1 + 1)
            hi = min(r2, r2 + n2 - n1)
            if lo <= hi:
                pl = _succ(g, pf1, n1, a, lo)
                pr = _pred(g, pf1, n1, a, hi)
                if (pl is not None and pl <= hi and pr is not None and pr >= lo
                        and pr + n1 - 1 >= r2 + rec.pi1 - 1 and (pr - pl) % rec.pi1 == 0):
                    t2.append(((pr - pl) // rec.pi1, a))
                    ov = r2 - pr
                    if rec.ov is None:
                        rec.ov = ov
                    elif rec.ov != ov:
                        rec.ov_conflicts += 1
    t1.sort()
    t2.sort()
    rec.t1 = t1
    rec.t2 = t2
    return rec


# ----------------------------------------------------------------------
# queries


def _best_in_ap(start: int, step: int | None, last: int, limit: int):
    """Largest value of start + i*step (<= last) not exceeding limit."""
    if start > limit:
        return None
    if not step:
        return start
    top = min(last, limit)
    return start + (top - start) // step * step


def _window_check(rec: QuadrupleRecord, s2_text: bytes, p1: bytes, d1: int, d2: int,
                  s2: int, b: int) -> bool:
    """Does S2 hold a P1 occurrence t inside an S1 copy or near the split with
    0 <= d2 - t <= b?  Every hit is a genuine pair of occurrences."""
    m1 = len(p1)
    n1, n2 = rec.n1, rec.n2
    k = max(0, math.ceil(math.log2(s2))) if s2 > 1 else 0
    x = rec.l2 - (1 << k)
    start = max(0, x + 1)
    end = min(n2, d2 + m1)
    assert end - start <= 2 * s2 + m1 + 1
    window = s2_text[start:end]
    i = window.rfind(p1)
    if i != -1 and start + i <= d2:
        if d2 - (start + i) <= b:
            return True
    if x < 0:
        return False
    pi = rec.pi1
    span = (n1 - d1 - m1) // pi * pi if pi else 0
    p1x, p1a, p1b = rec.triples.get(k, (None, None, None))
    cands = []
    if p1x is not None:
        cands.append(_best_in_ap(p1x + d1, pi, p1x + d1 + span, d2))
    if p1a is not None:
        if pi and (p1b - p1a) % pi == 0:
            cands.append(_best_in_ap(p1a + d1, pi, p1b + d1 + span, d2))
        else:
            cands.append(_best_in_ap(p1a + d1, pi, p1a + d1 + span, d2))
            cands.append(_best_in_ap(p1b + d1, pi, p1b + d1 + span, d2))
    return any(c is not None and 0 <= d2 - c <= b for c in cands)


def candidate_nonterminals(ci: CoIndex, h1: CoPatternHandle, h2: CoPatternHandle, b: int):
    """Rules that may hold a b-close relevant co-occurrence, with the subcase that fired."""
    out: dict[int, set] = {}
    if h1.absent or h2.absent:
        return out
    m1 = h1.m
    if m1 == 1 or h2.m == 1:
        # no inner split: scan rules where P2 is relevant or starts in the tail
        pf1, pf2 = h1.occ.profile, h2.occ.profile
        for a in ci.occ.rules:
            if pf1.occ[a] and (a in pf2.rel or pf2.tlm[a] >= 0):
                out.setdefault(a, set()).add((0, 0, "scan"))
        return out
    for s1, u1, v1 in h1.anchor_loci:
        d1 = u1.depth - s1
        for s2, u2, v2 in h2.anchor_loci:
            d2 = u2.depth - s2
            rec = ci.quadruple((u1.node, u2.node, v1.node, v2.node))
            delta = d1 - d2
            lo = bisect_left(rec.t1, (delta, -1))
            hi = bisect_left(rec.t1, (delta + b + 1, -1))
            for _, a in rec.t1[lo:hi]:
                out.setdefault(a, set()).add((s1, s2, "T1"))
            if rec.l_ref and _window_check(rec, ci.anchor(u2.node, v2.node).text,
                                           h1.pattern, d1, d2, s2, b):
                for a in rec.l_ref:
                    out.setdefault(a, set()).add((s1, s2, "L"))
            if rec.pi1 is not None and rec.t2 and rec.ov is not None:
                pi = rec.pi1
                base = delta - rec.ov
                qa = -((-base) // pi)
                qb = (base + b) // pi
                ell = -((rec.n1 - m1 - d1) // pi)
                low = max(ell, qa)
                if low <= qb:
                    for _, a in rec.t2[bisect_left(rec.t2, (low, -1)):]:
                        out.setdefault(a, set()).add((s1, s2, "T2"))
    return out


def relevant_close_co_occurrences(ci: CoIndex, h1: CoPatternHandle, h2: CoPatternHandle,
                                  a: int, b: int) -> list[tuple[int, int]]:
    """b-close relevant co-occurrences in <a>, local coordinates, sorted by q1.

    Every relevant co-occurrence pairs a P2 occurrence that is relevant or the
    leftmost one in the tail with its P1 predecessor.
    """
    if h1.absent or h2.absent:
        return []
    g = ci.g
    if type(g.productions[a]) is Leaf:
        return []
    pf1, pf2 = h1.occ.profile, h2.occ.profile
    m1, m2 = h1.m, h2.m
    hl = g.head_len(a)
    cands = list(pf2.rel.get(a, ()))
    if pf2.tlm[a] >= 0:
        cands.append(pf2.tlm[a])
    out = []
    for q2 in cands:
        q1 = _pred(g, pf1, m1, a, q2)
        if q1 is None or q1 >= hl or q2 - q1 > b:
            continue
        if q2 > 0:
            prev = _pred(g, pf2, m2, a, q2 - 1)
            if prev is not None and prev >= q1:
                continue
        out.append((q1, q2))
    out.sort()
    return out


def _first_inside(p1: bytes, p2: bytes):
    i = p1.find(p2)
    return None if i < 0 else i


def occurrence_anchors(ci: CoIndex, h: CoPatternHandle):
    """(rule, relevant occurrences) covering every occurrence of the pattern."""
    if h.absent:
        return []
    g = ci.g
    pf = h.occ.profile
    if h.m == 1:
        c = h.pattern[0]
        return [(a, [0]) for a in range(g.size)
                if type(g.productions[a]) is Leaf and g.productions[a].ch == c]
    return sorted(pf.rel.items())


def query_close(ci: CoIndex, p1: bytes, p2: bytes, b: int, debug: bool = False,
                stats: dict | None = None) -> list[tuple[int, int]]:
    p1, p2 = bytes(p1), bytes(p2)
    if not p1 or not p2:
        raise EmptyPattern("patterns must be non-empty")
    if b < 0:
        raise NegativeBound(f"b must be non-negative, got {b}")
    n = ci.g.n
    b = min(b, n - 1)
    stats = ci.stats if stats is None else stats
    f = _first_inside(p1, p2)
    h1 = CoPatternHandle(ci, p1)
    if f is not None:
        if f > b or h1.absent:
            return []
        anchors = [(a, [(q, q + f) for q in qs]) for a, qs in occurrence_anchors(ci, h1)]
        return report_from_anchors(ci, anchors, len(p1), len(p2), stats)
    h2 = CoPatternHandle(ci, p2)
    if h1.absent or h2.absent:
        return []
    anchors = []
    for a in sorted(candidate_nonterminals(ci, h1, h2, b)):
        pairs = relevant_close_co_occurrences(ci, h1, h2, a, b)
        if pairs:
            anchors.append((a, pairs))
    out = report_from_anchors(ci, anchors, len(p1), len(p2), stats)
    if debug:
        _debug_check(ci, h1, h2, out, b)
    return out


def _debug_check(ci: CoIndex, h1: CoPatternHandle, h2: CoPatternHandle, out, b: int) -> None:
    from .occindex import pred_succ
    g = ci.g
    occ = ci.occ
    for q1, q2 in out:
        assert 0 <= q2 - q1 <= b
        assert pred_succ(occ, h1.occ, g.start, q2, "pred") == q1
        assert pred_succ(occ, h2.occ, g.start, q1, "succ") == q2
