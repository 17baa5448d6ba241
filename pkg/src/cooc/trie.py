"""Compact tries over implicit grammar affixes.

An entry denotes ``<B>^j`` or its reverse for a symbol ``B``; the string is
never stored.  The trie is the sorted entry array plus its LCP array.  Nodes
are LCP intervals ``[lo, hi)`` with a depth, so a locus query is two binary
searches over the sorted entries.

Comparisons look at the first 64 characters directly and switch to
fingerprint binary search for longer common prefixes.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from functools import cmp_to_key
from typing import NamedTuple, Sequence

from .fingerprint import EMPTY, Fingerprint, GrammarFingerprints, fp_combine
from .grammar import Grammar

SHORT = 64


class TrieEntry(NamedTuple):
    symbol: int
    count: int = 1
    reversed: bool = False


class Locus(NamedTuple):
    lo: int
    hi: int
    found: bool
    node: int         # -1 when not found
    depth: int        # |label(node)|, 0 when not found
    hp: int           # heavy path id, -1 when not found


NOT_FOUND = Locus(0, 0, False, -1, 0, -1)


class EntryView:
    """Character and fingerprint access to entry strings."""

    def __init__(self, g: Grammar, fps: GrammarFingerprints):
        self.g = g
        self.fps = fps

    def length(self, e: TrieEntry) -> int:
        return self.g.exp_len[e.symbol] * e.count

    def char(self, e: TrieEntry, i: int) -> int:
        bl = self.g.exp_len[e.symbol]
        i %= bl
        if e.reversed:
            i = bl - 1 - i
        return self.g.random_access(i, e.symbol)

    def prefix(self, e: TrieEntry, length: int) -> bytes:
        g = self.g
        bl = g.exp_len[e.symbol]
        length = min(length, bl * e.count)
        q, r = divmod(length, bl)
        if not e.reversed:
            body = g._full(e.symbol) * q if q else b""
            return body + g._prefix(e.symbol, r)
        # prefix of rev(<B>^j) = reverse of the suffix of <B>^j
        body = g._full(e.symbol)[::-1] * q if q else b""
        return body + g._suffix(e.symbol, r)[::-1]

    def materialize(self, e: TrieEntry) -> bytes:
        return self.prefix(e, self.length(e))

    def fp(self, e: TrieEntry, length: int) -> Fingerprint:
        return self.fps.power_prefix(e.symbol, e.count, length, e.reversed)


class CompactTrie:
    """Sorted implicit strings with LCP-interval nodes and heavy paths."""

    def __init__(self, view: EntryView, entries: Sequence[TrieEntry], order: list[int],
                 lcp: list[int]):
        self.view = view
        self.entries = list(entries)          # in insertion (id) order
        self.order = order                    # rank -> entry id
        self.rank = [0] * len(order)          # entry id -> rank
        for r, i in enumerate(order):
            self.rank[i] = r
        self.lcp = lcp                        # lcp[r] = LCP(rank r-1, rank r); lcp[0] = 0
        self.sorted_entries = [self.entries[i] for i in order]
        self.lengths = [view.length(e) for e in self.sorted_entries]
        self.short = [view.prefix(e, SHORT) for e in self.sorted_entries]
        self._build_nodes()

    # --- construction -------------------------------------------------
    def _build_nodes(self) -> None:
        n = len(self.order)
        lo_l, hi_l, depth_l, parent_l = [0], [n], [0], [-1]
        children: list[list[int]] = [[]]
        # internal LCP intervals via the classic stack sweep
        stack = [0]                          # node ids; root has depth 0
        lcp = self.lcp
        for i in range(1, n + 1):
            cur = lcp[i] if i < n else -1
            lb = i - 1
            last = -1
            while len(stack) > 1 and cur < depth_l[stack[-1]]:
                node = stack.pop()
                hi_l[node] = i
                lb = lo_l[node]
                last = node
                if cur <= depth_l[stack[-1]]:
                    parent_l[node] = stack[-1]
                    children[stack[-1]].append(node)
                    last = -1
            if i < n and cur > depth_l[stack[-1]]:
                node = len(lo_l)
                lo_l.append(lb)
                hi_l.append(-1)
                depth_l.append(cur)
                parent_l.append(-1)
                children.append([])
                if last >= 0:
                    parent_l[last] = node
                    children[node].append(last)
                stack.append(node)
        hi_l[0] = n
        # leaves for entries that extend below their deepest interval
        entry_node = [0] * n
        for node in range(len(lo_l)):
            covered = bytearray(hi_l[node] - lo_l[node])
            for c in children[node]:
                for r in range(lo_l[c], hi_l[c]):
                    covered[r - lo_l[node]] = 1
            for off, flag in enumerate(covered):
                if flag:
                    continue
                r = lo_l[node] + off
                if self.lengths[r] > depth_l[node]:
                    leaf = len(lo_l)
                    lo_l.append(r)
                    hi_l.append(r + 1)
                    depth_l.append(self.lengths[r])
                    parent_l.append(node)
                    children.append([])
                    children[node].append(leaf)
                    entry_node[r] = leaf
                else:
                    entry_node[r] = node
        for ch in children:
            ch.sort(key=lambda c: lo_l[c])
        self.node_lo, self.node_hi, self.node_depth = lo_l, hi_l, depth_l
        self.node_parent, self.children = parent_l, children
        self.entry_node = entry_node
        # interval -> node, deepest wins (only the root can share an interval)
        self.interval_node: dict[tuple[int, int], int] = {}
        for node in sorted(range(len(lo_l)), key=lambda x: depth_l[x]):
            self.interval_node[(lo_l[node], hi_l[node])] = node
        # heavy paths
        hp = [0] * len(lo_l)
        next_id = 1
        todo = [0]
        while todo:
            node = todo.pop()
            kids = children[node]
            if not kids:
                continue
            heavy = kids[0]
            for c in kids[1:]:
                if hi_l[c] - lo_l[c] > hi_l[heavy] - lo_l[heavy]:
                    heavy = c
            for c in kids:
                if c == heavy:
                    hp[c] = hp[node]
                else:
                    hp[c] = next_id
                    next_id += 1
            todo.extend(reversed(kids))
        self.hp = hp
        self.num_paths = next_id

    # --- accessors ----------------------------------------------------
    def __len__(self) -> int:
        return len(self.order)

    @property
    def num_nodes(self) -> int:
        return len(self.node_lo)

    def hp_of(self, node: int) -> int:
        return self.hp[node]

    def depth(self, node: int) -> int:
        return self.node_depth[node]

    def interval(self, node: int) -> tuple[int, int]:
        return self.node_lo[node], self.node_hi[node]

    def label(self, node: int) -> bytes:
        if node == 0 or self.node_depth[node] == 0:
            return b""
        return self.view.prefix(self.sorted_entries[self.node_lo[node]], self.node_depth[node])

    def label_spec(self, node: int) -> tuple[TrieEntry, int]:
        """An entry whose prefix of length depth(node) is the node label."""
        return self.sorted_entries[self.node_lo[node]], self.node_depth[node]

    def leaf_path(self, rank: int) -> list[tuple[int, int]]:
        """(heavy path id, lowest node on it) along the root path of an entry."""
        out = []
        node = self.entry_node[rank]
        seen = set()
        while node >= 0:
            h = self.hp[node]
            if h not in seen:
                seen.add(h)
                out.append((h, node))
            node = self.node_parent[node]
        return out

    def locus_record(self, lo: int, hi: int, length: int) -> Locus:
        if hi <= lo:
            return NOT_FOUND
        if length == 0:
            node = 0
        else:
            node = self.interval_node[(lo, hi)]
        return Locus(lo, hi, True, node, self.node_depth[node], self.hp[node])

    # --- queries ------------------------------------------------------
    def locus(self, query: bytes) -> Locus:
        return batch_locus(self, query, [0])[0]


def _entry_cmp_factory(view: EntryView, entries: Sequence[TrieEntry], lens: list[int],
                       shorts: list[bytes]):
    def lcp_long(a: int, b: int) -> int:
        ea, eb = entries[a], entries[b]
        lo, hi = SHORT, min(lens[a], lens[b])
        # invariant: prefixes of length lo agree
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if view.fp(ea, mid) == view.fp(eb, mid):
                lo = mid
            else:
                hi = mid - 1
        return lo

    def lcp(a: int, b: int) -> int:
        sa, sb = shorts[a], shorts[b]
        if sa != sb or len(sa) < SHORT:
            n = min(len(sa), len(sb))
            i = 0
            while i < n and sa[i] == sb[i]:
                i += 1
            return i
        return lcp_long(a, b)

    def cmp(a: int, b: int) -> int:
        sa, sb = shorts[a], shorts[b]
        if sa != sb:
            return -1 if sa < sb else 1
        la, lb = lens[a], lens[b]
        if la <= SHORT or lb <= SHORT:
            if la != lb:
                return -1 if la < lb else 1
            return (a > b) - (a < b)
        k = lcp_long(a, b)
        if k == la or k == lb:
            if la != lb:
                return -1 if la < lb else 1
            return (a > b) - (a < b)
        ca, cb = view.char(entries[a], k), view.char(entries[b], k)
        return -1 if ca < cb else 1

    return cmp, lcp


def build_trie(view: EntryView, entries: Sequence[TrieEntry]) -> CompactTrie:
    entries = list(entries)
    lens = [view.length(e) for e in entries]
    shorts = [view.prefix(e, SHORT) for e in entries]
    cmp, lcp = _entry_cmp_factory(view, entries, lens, shorts)
    order = sorted(range(len(entries)), key=cmp_to_key(cmp))
    lcps = [0] * len(order)
    for r in range(1, len(order)):
        lcps[r] = lcp(order[r - 1], order[r])
    return CompactTrie(view, entries, order, lcps)


class PatternFingerprints:
    """Prefix fingerprints of an explicit pattern, for substring fingerprints."""

    def __init__(self, params, pattern: bytes):
        self.params = params
        self.pattern = pattern
        self.phi = [0]
        self.rp = [1]
        self._ri = params.r_inv

    def _extend(self, j: int) -> None:
        p, r = self.params
        phi, rp = self.phi, self.rp
        acc, pw = phi[-1], rp[-1]
        for c in self.pattern[len(phi) - 1:j]:
            acc = (acc + pw * c) % p
            pw = pw * r % p
            phi.append(acc)
            rp.append(pw)

    def sub(self, i: int, length: int) -> Fingerprint:
        p = self.params.p
        j = i + length
        if j >= len(self.phi):
            self._extend(j)
        inv = pow(self._ri, i, p)
        return Fingerprint((self.phi[j] - self.phi[i]) * inv % p,
                           self.rp[length], pow(self._ri, length, p), length)


class ConcatFingerprints:
    """Substring fingerprints of a concatenation, from per-piece fingerprints."""

    def __init__(self, params, parts: Sequence[PatternFingerprints]):
        self.params = params
        self.parts = list(parts)
        self.starts = []
        pos = 0
        for pt in self.parts:
            self.starts.append(pos)
            pos += len(pt.pattern)

    def sub(self, i: int, length: int) -> Fingerprint:
        acc = EMPTY
        k = bisect_right(self.starts, i) - 1
        while length > 0:
            pt = self.parts[k]
            j = i - self.starts[k]
            take = min(length, len(pt.pattern) - j)
            if take > 0:
                acc = fp_combine(self.params, acc, pt.sub(j, take))
                i += take
                length -= take
            k += 1
        return acc


def batch_locus(t: CompactTrie, pattern: bytes, offsets: Sequence[int],
                pfp: PatternFingerprints | None = None) -> list[Locus]:
    """Locus of ``pattern[i:]`` for every offset ``i``."""
    out = []
    n = len(t)
    for i in offsets:
        q = pattern[i:]
        ql = len(q)
        if ql == 0:
            out.append(t.locus_record(0, n, 0))
            continue
        if ql <= SHORT:
            key = lambda s, ql=ql: s[:ql]
            lo = bisect_left(t.short, q, key=key)
            hi = bisect_right(t.short, q, key=key)
            out.append(t.locus_record(lo, hi, ql))
            continue
        head = q[:SHORT]
        key = lambda s: s[:SHORT]
        lo = bisect_left(t.short, head, key=key)
        hi = bisect_right(t.short, head, key=key)
        if lo == hi:
            out.append(NOT_FOUND)
            continue
        if pfp is None:
            pfp = PatternFingerprints(t.view.fps.params, pattern)
        view = t.view

        def rel(r: int) -> int:
            e = t.sorted_entries[r]
            el = t.lengths[r]
            a, b = SHORT, min(el, ql)
            while a < b:
                mid = (a + b + 1) // 2
                if view.fp(e, mid) == pfp.sub(i, mid):
                    a = mid
                else:
                    b = mid - 1
            if a == ql:
                return 0
            if a == el:
                return -1
            return -1 if view.char(e, a) < q[a] else 1

        a, b = lo, hi
        while a < b:
            mid = (a + b) // 2
            if rel(mid) < 0:
                a = mid + 1
            else:
                b = mid
        first = a
        b = hi
        while a < b:
            mid = (a + b) // 2
            if rel(mid) <= 0:
                a = mid + 1
            else:
                b = mid
        out.append(t.locus_record(first, a, ql))
    return out


def audit_trie(t: CompactTrie) -> bool:
    """Check the sorted order and LCP array against materialized strings."""
    strs = [t.view.materialize(e) for e in t.sorted_entries]
    for r in range(1, len(strs)):
        a, b = strs[r - 1], strs[r]
        if a > b:
            return False
        k = t.lcp[r]
        if a[:k] != b[:k]:
            return False
        if k < len(a) and k < len(b) and a[k] == b[k]:
            return False
    return True
