"""Brute-force reference answers computed on decompressed strings.

Everything here follows the definitions literally and is meant to be easy to
trust, not fast.  Positions are 0-based; an occurrence of P in a string X is
relevant for a rule A when it starts in the head and ends in the tail, i.e.
``q < |head(A)| < q + |P|``.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

from .compress import SplitSet
from .errors import EmptyPattern
from .grammar import Grammar, Leaf, Pair


def naive_occurrences(text: bytes, pattern: bytes) -> list[int]:
    if not pattern:
        raise EmptyPattern("pattern must be non-empty")
    out = []
    i = text.find(pattern)
    while i != -1:
        out.append(i)
        i = text.find(pattern, i + 1)
    return out


def naive_co_occurrences(text: bytes, p1: bytes, p2: bytes) -> list[tuple[int, int]]:
    """All (q1, q2) with no P1 in (q1, q2] and no P2 in [q1, q2)."""
    occ1 = naive_occurrences(text, p1)
    occ2 = naive_occurrences(text, p2)
    out = []
    for q2 in occ2:
        j = bisect_right(occ1, q2) - 1
        if j < 0:
            continue
        q1 = occ1[j]
        # any P2 occurrence in [q1, q2) breaks consecutiveness
        k = bisect_left(occ2, q1)
        if occ2[k] < q2:
            continue
        out.append((q1, q2))
    return out


def naive_b_close(text: bytes, p1: bytes, p2: bytes, b: int) -> list[tuple[int, int]]:
    return [(q1, q2) for q1, q2 in naive_co_occurrences(text, p1, p2) if q2 - q1 <= b]


def is_co_occurrence(occ1: list[int], occ2: list[int], q1: int, q2: int) -> bool:
    """Definition check against sorted occurrence lists."""
    if q1 > q2:
        return False
    i = bisect_left(occ1, q1)
    if i == len(occ1) or occ1[i] != q1:
        return False
    i = bisect_left(occ2, q2)
    if i == len(occ2) or occ2[i] != q2:
        return False
    if bisect_right(occ1, q2) - bisect_right(occ1, q1) > 0:
        return False
    return bisect_left(occ2, q2) - bisect_left(occ2, q1) == 0


def head_length(g: Grammar, a: int) -> int:
    return g.head_len(a)


def naive_relevant(g: Grammar, a: int, pattern: bytes) -> list[tuple[int, int]]:
    """Relevant occurrences of ``pattern`` in ``<a>`` as (q, split) pairs."""
    if type(g.productions[a]) is Leaf:
        return []
    x = g.expand(a)
    h = g.head_len(a)
    m = len(pattern)
    out = []
    for q in naive_occurrences(x, pattern):
        if q < h < q + m:
            out.append((q, h - q))
    return out


def naive_relevant_rev(g: Grammar, a: int, pattern: bytes) -> list[tuple[int, int]]:
    """Relevant occurrences of rev(P) in rev(<a>), for a Power rule.

    Returned as (q, split) in the reversed string.  For a Pair rule the reverse
    view is the same set of occurrences, so only Power rules are interesting.
    """
    p = g.productions[a]
    if type(p) is Leaf:
        return []
    x = g.expand(a)[::-1]
    if type(p) is Pair:
        h = g.exp_len[p.right]
    else:
        h = g.exp_len[p.base]
    rp = pattern[::-1]
    m = len(rp)
    return [(q, h - q) for q in naive_occurrences(x, rp) if q < h < q + m]


def naive_splits_of(g: Grammar, a: int, pattern: bytes) -> set[int]:
    m = len(pattern)
    out = {s for _, s in naive_relevant(g, a, pattern)}
    out.update(m - s for _, s in naive_relevant_rev(g, a, pattern))
    return out


def naive_splits(g: Grammar, pattern: bytes) -> SplitSet:
    out: set[int] = set()
    for a in range(g.size):
        out |= naive_splits_of(g, a, pattern)
    return SplitSet(len(pattern), tuple(sorted(out)), "oracle")


def period(x: bytes) -> int:
    """Smallest period via the failure function."""
    n = len(x)
    if n == 0:
        raise ValueError("period of the empty string is undefined")
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and x[i] != x[k]:
            k = fail[k - 1]
        if x[i] == x[k]:
            k += 1
        fail[i] = k
    return n - fail[-1]


def is_periodic(x: bytes) -> bool:
    return 2 * period(x) <= len(x)


def naive_relevant_co_occurrences(g: Grammar, a: int, p1: bytes, p2: bytes) -> list[tuple[int, int]]:
    """Co-occurrences of (P1, P2) inside <a> with q1 < |head| <= q2 + |P2| - 1."""
    if type(g.productions[a]) is Leaf:
        return []
    x = g.expand(a)
    h = g.head_len(a)
    return [(q1, q2) for q1, q2 in naive_co_occurrences(x, p1, p2)
            if q1 < h <= q2 + len(p2) - 1]


def has_close_pair(x: bytes, p1: bytes, p2: bytes, b: int) -> bool:
    """Whether some P1 occurrence q1 and P2 occurrence q2 satisfy 0 <= q2-q1 <= b."""
    occ2 = naive_occurrences(x, p2)
    for q1 in naive_occurrences(x, p1):
        j = bisect_left(occ2, q1)
        if j < len(occ2) and occ2[j] - q1 <= b:
            return True
    return False
