"""Grammar generators for highly compressible test words."""

from __future__ import annotations

import random

from .grammar import Grammar, Leaf, Pair, validate_and_index


def _prefix_rule(prods: list, full: list[int], lens: list[int], split, k: int, n: int) -> int:
    """Rule for the length-n prefix of the k-th word, given how word k splits."""
    while True:
        if n == lens[k]:
            return full[k]
        left, right = split(k)
        if n <= lens[left]:
            k = left
            continue
        rest = _prefix_rule(prods, full, lens, split, right, n - lens[left])
        prods.append(Pair(full[left], rest))
        return len(prods) - 1


def fibonacci_slp(n: int) -> Grammar:
    """SLP for the length-n prefix of the Fibonacci word abaababaabaab..."""
    if n < 1:
        raise ValueError("length must be positive")
    prods: list = [Leaf(ord("a")), Leaf(ord("b"))]
    full = [0, None]
    lens = [1, 2]
    prods.append(Pair(0, 1))
    full[1] = 2
    while lens[-1] < n:
        k = len(full)
        prods.append(Pair(full[k - 1], full[k - 2]))
        full.append(len(prods) - 1)
        lens.append(lens[k - 1] + lens[k - 2])
    k = len(full) - 1
    if n == 1:
        return validate_and_index([Leaf(ord("a"))], 0)
    start = _prefix_rule(prods, full, lens, lambda j: (j - 1, j - 2), k, n)
    return validate_and_index(prods, start)


def fibonacci_word(n: int) -> bytes:
    a, b = b"a", b"ab"
    while len(b) < n:
        a, b = b, b + a
    return (b if n > 1 else a)[:n]


def thue_morse_slp(n: int) -> Grammar:
    """SLP for the length-n prefix of the Thue-Morse word abbabaab..."""
    if n < 1:
        raise ValueError("length must be positive")
    prods: list = [Leaf(ord("a")), Leaf(ord("b"))]
    ta, tb = [0], [1]
    lens = [1]
    while lens[-1] < n:
        prods.append(Pair(ta[-1], tb[-1]))
        na = len(prods) - 1
        prods.append(Pair(tb[-1], ta[-1]))
        tb.append(len(prods) - 1)
        ta.append(na)
        lens.append(2 * lens[-1])
    # index 2j is the j-th "a" word, 2j+1 its complement; word (2j) = a_{j-1} b_{j-1}
    full = [x for pair in zip(ta, tb) for x in pair]
    flens = [l for l in lens for _ in range(2)]

    def split(i):
        j, side = divmod(i, 2)
        return (2 * (j - 1), 2 * (j - 1) + 1) if side == 0 else (2 * (j - 1) + 1, 2 * (j - 1))

    start = _prefix_rule(prods, full, flens, split, 2 * (len(lens) - 1), n)
    return validate_and_index(prods, start)


def thue_morse_word(n: int) -> bytes:
    return bytes(ord("a") + bin(i).count("1") % 2 for i in range(n))


def random_text(rng: random.Random, n: int, sigma: int) -> bytes:
    alphabet = b"abcdefghijklmnopqrstuvwxyz"[:sigma]
    return bytes(rng.choice(alphabet) for _ in range(n))
