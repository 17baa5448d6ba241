"""Grammar construction: Re-Pair SLPs, recompression into RLSLPs, split sets.

The RLSLP is produced by recompression: phases alternate between collapsing
maximal runs ``X^k`` into Power rules and merging adjacent pairs ``XY`` where
a seeded hash colours ``X`` left and ``Y`` right.  Rules are hash-consed, so
the same pair or run always gets the same id, and the per-phase seeds are kept
in a :class:`LevelScheme`.  Replaying that scheme on a pattern tells which
positions of the pattern can become a head/tail boundary of some rule, which
is exactly the split set the indexes need.

The parsing runs on the decompressed text with numpy.  The resulting grammar
is the one recompression would produce on the SLP; only the running time is
linear in N instead of polylogarithmic.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import EmptyPattern, EmptyText, GrammarError, SeedExhausted
from .grammar import Grammar, Leaf, Pair, Power, dumps, loads, validate_and_index

RUN, PAIR_PHASE = "run", "pair"
MAX_LEVEL_ATTEMPTS = 32
MAX_BUILD_ATTEMPTS = 32
# height(G') <= C_H * log2(N) + C_0, measured worst ratio about 2.15 (N <= 10**6)
C_H = 3
C_0 = 2

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def colours(seed: int, symbols: np.ndarray) -> np.ndarray:
    """0 (left) or 1 (right) for each symbol under the given seed."""
    with np.errstate(over="ignore"):
        s = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        x = symbols.astype(np.uint64) * _GOLD + s
        return (_mix(x) & np.uint64(1)).astype(np.int8)


@dataclass
class LevelScheme:
    """Phase kinds and seeds, in the order they were applied."""
    kinds: list[str] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    base_seed: int = 0

    def __len__(self) -> int:
        return len(self.kinds)

    def to_json(self) -> dict:
        return {"base_seed": self.base_seed, "kinds": list(self.kinds),
                "seeds": [str(s) for s in self.seeds]}

    @classmethod
    def from_json(cls, d: dict) -> "LevelScheme":
        return cls(list(d["kinds"]), [int(s) for s in d["seeds"]], int(d["base_seed"]))


class SplitSet(NamedTuple):
    m: int
    splits: tuple[int, ...]
    mode: str


class NoOccurrenceCertificate(NamedTuple):
    """The pattern cannot occur: at ``level`` its replay needs a rule ``missing``
    (a byte for level -1, a pair or run key otherwise) that the grammar lacks."""
    level: int
    missing: tuple


# ----------------------------------------------------------------------
# Re-Pair


def build_slp(text: bytes) -> Grammar:
    """Re-Pair: replace the most frequent adjacent pair until none repeats."""
    if not text:
        raise EmptyText("cannot build a grammar for the empty text")
    text = bytes(text)
    alphabet = sorted(set(text))
    prods: list = [Leaf(c) for c in alphabet]
    code = np.full(256, -1, dtype=np.int64)
    for i, c in enumerate(alphabet):
        code[c] = i
    seq = code[np.frombuffer(text, dtype=np.uint8)]
    shift = np.int64(1 << 31)
    while len(seq) >= 2:
        keys = seq[:-1] * shift + seq[1:]
        uniq, counts = np.unique(keys, return_counts=True)
        best = int(counts.max())
        if best < 2:
            break
        # np.unique sorts keys, so argmax picks the smallest pair code on ties
        key = int(uniq[int(np.argmax(counts))])
        left, right = divmod(key, int(shift))
        new_id = len(prods)
        prods.append(Pair(left, right))
        pos = np.flatnonzero(keys == key)
        if left == right:
            keep = []
            last = -2
            for p in pos.tolist():
                if p > last + 1:
                    keep.append(p)
                    last = p
            pos = np.asarray(keep, dtype=np.int64)
        seq[pos] = new_id
        seq = np.delete(seq, pos + 1)
    # left-leaning binarisation of what is left
    acc = int(seq[0])
    for s in seq[1:].tolist():
        prods.append(Pair(acc, s))
        acc = len(prods) - 1
    return validate_and_index(prods, acc, "SLP")


# ----------------------------------------------------------------------
# recompression


def _level_seed(base: int, level: int, attempt: int) -> int:
    rng = random.Random((base * 1_000_003 + level) * 131 + attempt)
    return rng.getrandbits(63)


def _recompress(text: bytes, base_seed: int):
    alphabet = sorted(set(text))
    prods: list = [Leaf(c) for c in alphabet]
    code = np.full(256, -1, dtype=np.int64)
    for i, c in enumerate(alphabet):
        code[c] = i
    seq = code[np.frombuffer(text, dtype=np.uint8)]
    pair_ids: dict[tuple[int, int], int] = {}
    run_ids: dict[tuple[int, int], int] = {}
    scheme = LevelScheme(base_seed=base_seed)
    shift = np.int64(1 << 31)
    level = 0
    while len(seq) > 1:
        if level % 2 == 0:
            # run phase
            n = len(seq)
            change = np.flatnonzero(seq[1:] != seq[:-1]) + 1
            starts = np.concatenate(([0], change))
            lengths = np.diff(np.concatenate((starts, [n])))
            syms = seq[starts]
            multi = lengths >= 2
            if multi.any():
                keys = syms[multi] * shift + lengths[multi]
                uniq, inv = np.unique(keys, return_inverse=True)
                ids = np.empty(len(uniq), dtype=np.int64)
                for j, key in enumerate(uniq.tolist()):
                    x, k = divmod(key, int(shift))
                    rid = run_ids.get((x, k))
                    if rid is None:
                        rid = len(prods)
                        prods.append(Power(x, k))
                        run_ids[(x, k)] = rid
                    ids[j] = rid
                syms = syms.copy()
                syms[multi] = ids[inv]
            seq = syms
            scheme.kinds.append(RUN)
            scheme.seeds.append(0)
        else:
            n = len(seq)
            need = max(1, n // 8)
            for attempt in range(MAX_LEVEL_ATTEMPTS):
                seed = _level_seed(base_seed, level, attempt)
                col = colours(seed, seq)
                hit = np.flatnonzero((col[:-1] == 0) & (col[1:] == 1))
                if len(hit) >= need:
                    break
            else:
                return None
            keys = seq[hit] * shift + seq[hit + 1]
            uniq, inv = np.unique(keys, return_inverse=True)
            ids = np.empty(len(uniq), dtype=np.int64)
            for j, key in enumerate(uniq.tolist()):
                x, y = divmod(key, int(shift))
                pid = pair_ids.get((x, y))
                if pid is None:
                    pid = len(prods)
                    prods.append(Pair(x, y))
                    pair_ids[(x, y)] = pid
                ids[j] = pid
            seq = seq.copy()
            seq[hit] = ids[inv]
            seq = np.delete(seq, hit + 1)
            scheme.kinds.append(PAIR_PHASE)
            scheme.seeds.append(seed)
        level += 1
    return prods, int(seq[0]), scheme


def recompress_text(text: bytes, seed: int = 0) -> tuple[Grammar, LevelScheme]:
    if not text:
        raise EmptyText("cannot build a grammar for the empty text")
    rng = random.Random(seed)
    for _ in range(MAX_BUILD_ATTEMPTS):
        base = rng.getrandbits(62)
        out = _recompress(bytes(text), base)
        if out is not None:
            prods, start, scheme = out
            return validate_and_index(prods, start, "RLSLP"), scheme
    raise SeedExhausted(f"no seed passed the size checks in {MAX_BUILD_ATTEMPTS} attempts")


def height_bound(n: int) -> float:
    return C_H * math.log2(max(n, 1)) + C_0


def to_rlslp(g: Grammar, seed: int = 0) -> tuple[Grammar, LevelScheme]:
    """Turn an SLP into a height-O(log N) RLSLP plus the scheme that built it."""
    return recompress_text(g.expand(), seed)


# ----------------------------------------------------------------------
# split sets


class _KeyTable:
    """Sorted int64 keys ``x * width + y`` mapped to rule ids."""

    def __init__(self, pairs: dict[tuple[int, int], int], width: int):
        self.width = width
        if pairs:
            keys = np.fromiter((x * width + y for x, y in pairs), dtype=np.int64, count=len(pairs))
            vals = np.fromiter(pairs.values(), dtype=np.int64, count=len(pairs))
            order = np.argsort(keys, kind="stable")
            self.keys, self.vals = keys[order], vals[order]
        else:
            self.keys = np.zeros(0, dtype=np.int64)
            self.vals = np.zeros(0, dtype=np.int64)

    def lookup(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, int]:
        """Rule ids for the keys, plus the index of the first missing key or -1."""
        q = x.astype(np.int64) * self.width + y.astype(np.int64)
        pos = np.searchsorted(self.keys, q)
        pos_c = np.minimum(pos, max(len(self.keys) - 1, 0))
        ok = (pos < len(self.keys)) & (self.keys[pos_c] == q) if len(self.keys) else np.zeros(len(q), bool)
        if not ok.all():
            return pos_c, int(np.argmin(ok))
        return self.vals[pos_c], -1


class _RuleTables:
    """Reverse lookup tables for replaying a scheme against a grammar."""

    def __init__(self, g: Grammar):
        self.leaf: dict[int, int] = {}
        pair: dict[tuple[int, int], int] = {}
        run: dict[tuple[int, int], int] = {}
        for i, p in enumerate(g.productions):
            if type(p) is Leaf:
                self.leaf.setdefault(p.ch, i)
            elif type(p) is Pair:
                pair.setdefault((p.left, p.right), i)
            else:
                run.setdefault((p.base, p.exponent), i)
        self.leaf_arr = np.full(256, -1, dtype=np.int64)
        for ch, i in self.leaf.items():
            self.leaf_arr[ch] = i
        self.pair = _KeyTable(pair, g.size)
        self.run = _KeyTable(run, max([e for _, e in run] or [0]) + 1)


_TABLE_CACHE: dict[int, tuple[Grammar, _RuleTables]] = {}


def _tables(g: Grammar) -> _RuleTables:
    hit = _TABLE_CACHE.get(id(g))
    if hit is not None and hit[0] is g:
        return hit[1]
    t = _RuleTables(g)
    if len(_TABLE_CACHE) > 64:
        _TABLE_CACHE.clear()
    _TABLE_CACHE[id(g)] = (g, t)
    return t


def compute_splits(g: Grammar, scheme: LevelScheme, pattern: bytes, mode: str = "fast"):
    """Superset of the split values any rule of ``g`` can give ``pattern``.

    Fast mode replays ``scheme`` on the pattern.  Blocks whose parse depends
    on the unseen context are folded into an unknown region at either end;
    positions inside those regions that might still be boundaries are kept as
    "possible".  At every phase the boundary a new rule would put inside an
    occurrence is either the single certain boundary or one of the possible
    ones, and those are collected.
    """
    pattern = bytes(pattern)
    m = len(pattern)
    if m == 0:
        raise EmptyPattern("pattern must be non-empty")
    if mode == "broad":
        return SplitSet(m, tuple(range(1, m)), "broad")
    if mode != "fast":
        raise ValueError(f"mode must be 'fast' or 'broad', not {mode!r}")
    tables = _tables(g)
    syms = tables.leaf_arr[np.frombuffer(pattern, dtype=np.uint8)]
    if (syms < 0).any():
        return NoOccurrenceCertificate(-1, (pattern[int(np.argmax(syms < 0))],))
    if m == 1:
        return SplitSet(1, (), "fast")

    edges = np.arange(m + 1, dtype=np.int64)     # block i spans [edges[i], edges[i+1])
    possible: set[int] = set()
    found: set[int] = set()

    def inner(e) -> bool:
        return 0 < e < m

    for level, kind in enumerate(scheme.kinds):
        r = len(syms)
        if r == 0:
            break
        certain = edges[(edges > 0) & (edges < m)]
        if kind == PAIR_PHASE:
            if len(certain) == 1:
                found.add(int(certain[0]))
            elif not len(certain):
                found.update(possible)
            col = colours(scheme.seeds[level], syms)
            lo, hi = 0, r
            if col[0] == 1:          # may pair with whatever precedes the pattern
                if inner(edges[0]):
                    possible.add(int(edges[0]))
                lo = 1
            if hi > lo and col[r - 1] == 0:
                if inner(edges[r]):
                    possible.add(int(edges[r]))
                hi = r - 1
            if lo >= hi:
                possible.update(int(e) for e in edges[lo:hi + 1] if inner(e))
                syms = syms[:0]
                break
            core = syms[lo:hi]
            cc = col[lo:hi]
            start = np.flatnonzero((cc[:-1] == 0) & (cc[1:] == 1))
            z, bad = tables.pair.lookup(core[start], core[start + 1])
            if bad >= 0:
                i = int(start[bad])
                return NoOccurrenceCertificate(level, (int(core[i]), int(core[i + 1])))
            keep = np.ones(len(core), dtype=bool)
            keep[start + 1] = False
            new_syms = core.copy()
            new_syms[start] = z
            ekeep = np.ones(len(core) + 1, dtype=bool)
            ekeep[start + 1] = False
            syms, edges = new_syms[keep], edges[lo:hi + 1][ekeep]
        else:
            # runs touching either end may continue outside the pattern
            # A new Power rule can hold the whole pattern only when every
            # known block is the same symbol.  Its first copy boundary lies
            # in the left unknown region or is one of the first two certain
            # boundaries; symmetrically for the boundary before its last copy.
            diff = np.flatnonzero(syms[1:] != syms[:-1]) + 1
            if not len(diff):
                if len(certain):
                    c0, c1 = int(certain[0]), int(certain[-1])
                    found.update(p for p in possible if p < c0 or p > c1)
                    found.update(int(e) for e in certain[:2])
                    found.update(int(e) for e in certain[-2:])
                else:
                    found.update(possible)
                if inner(edges[0]):
                    possible.add(int(edges[0]))
                if inner(edges[r]):
                    possible.add(int(edges[r]))
                syms = syms[:0]
                break
            j, k = int(diff[0]), int(diff[-1])
            if inner(edges[0]):
                possible.add(int(edges[0]))
            if inner(edges[r]):
                possible.add(int(edges[r]))
            starts = diff[:-1]
            starts = np.concatenate(([j], starts[starts > j])) if j < k else starts[:0]
            ends = np.concatenate((starts[1:], [k]))
            cnt = ends - starts
            new_syms = syms[starts].copy()
            multi = np.flatnonzero(cnt > 1)
            if len(multi):
                z, bad = tables.run.lookup(new_syms[multi], cnt[multi])
                if bad >= 0:
                    i = int(multi[bad])
                    return NoOccurrenceCertificate(level, (int(new_syms[i]), int(cnt[i])))
                new_syms[multi] = z
            syms = new_syms
            edges = np.concatenate(([edges[j]], edges[ends]))
            if not len(syms):
                if inner(edges[0]):
                    possible.add(int(edges[0]))
                break
    found.update(possible)
    if len(syms) >= 2:
        # two certain blocks survived the last phase; the text is one symbol
        return NoOccurrenceCertificate(len(scheme.kinds), (int(syms[0]), int(syms[1])))
    return SplitSet(m, tuple(sorted(e for e in found if inner(e))), "fast")




# ----------------------------------------------------------------------
# grammar files with an embedded scheme

SCHEME_TAG = "#scheme "


def dump_grammar_file(g: Grammar, scheme: LevelScheme | None = None) -> str:
    """Grammar text; an RLSLP's scheme rides along as a comment line."""
    text = dumps(g)
    if scheme is None:
        return text
    head, rest = text.split("\n", 1)
    blob = json.dumps(scheme.to_json(), sort_keys=True, separators=(",", ":"))
    return f"{head}\n{SCHEME_TAG}{blob}\n{rest}"


def load_grammar_file(text: str) -> tuple[Grammar, LevelScheme | None]:
    g = loads(text)
    scheme = None
    for line in text.splitlines():
        if line.startswith(SCHEME_TAG):
            try:
                scheme = LevelScheme.from_json(json.loads(line[len(SCHEME_TAG):]))
            except (ValueError, KeyError, TypeError) as e:
                raise GrammarError(f"bad scheme line: {e}") from None
            break
    return g, scheme
