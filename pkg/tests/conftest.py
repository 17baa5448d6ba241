import random

import pytest

from cooc.compress import LevelScheme, recompress_text
from cooc.grammar import Leaf, Pair, Power, validate_and_index
from cooc.occindex import build_occ_index
from cooc.coindex import build_co_index

EXAMPLE = b"aababacacabc"


def grammar_of_strings(strings, power=None):
    """Grammar with one symbol per string (left-deep pairs), returned with the symbol map.

    ``power`` optionally adds a run rule ``(base string, k)``.
    """
    prods = []
    leaf, pair = {}, {}

    def sym_of(s: bytes) -> int:
        cur = None
        for c in s:
            if c not in leaf:
                prods.append(Leaf(c))
                leaf[c] = len(prods) - 1
            x = leaf[c]
            if cur is None:
                cur = x
                continue
            key = (cur, x)
            if key not in pair:
                prods.append(Pair(cur, x))
                pair[key] = len(prods) - 1
            cur = pair[key]
        return cur

    syms = {s: sym_of(s) for s in strings}
    top = [syms[s] for s in strings]
    if power is not None:
        base, k = power
        prods.append(Power(sym_of(base), k))
        top.append(len(prods) - 1)
    start = top[0]
    for x in top[1:]:
        prods.append(Pair(start, x))
        start = len(prods) - 1
    return validate_and_index(prods, start), syms


def example_grammar():
    """SLP for aababacacabc with A -> D C, <D> = aabab, <C> = E F, <E> = acac, <F> = abc."""
    prods = [Leaf(ord("a")), Leaf(ord("b")), Leaf(ord("c")),
             Pair(0, 1),          # 3: ab
             Pair(0, 3),          # 4: aab
             Pair(4, 3),          # 5: D = aabab
             Pair(0, 2),          # 6: ac
             Pair(6, 6),          # 7: E = acac
             Pair(3, 2),          # 8: F = abc
             Pair(7, 8),          # 9: C = acacabc
             Pair(5, 9)]          # 10: A
    names = {"D": 5, "E": 7, "F": 8, "C": 9, "A": 10}
    return validate_and_index(prods, 10), names


def broad_index(g):
    """Indexes over a hand-made grammar; broad splits need no scheme."""
    occ = build_occ_index(g, LevelScheme(), split_mode="broad")
    return occ, build_co_index(occ)


def text_index(text: bytes, seed: int = 0):
    g, scheme = recompress_text(text, seed)
    occ = build_occ_index(g, scheme, seed=seed)
    return g, occ, build_co_index(occ)


def random_texts(seed: int, count: int, max_len: int, sigma_max: int = 4):
    rng = random.Random(seed)
    for _ in range(count):
        sigma = rng.randint(1, sigma_max)
        n = rng.randint(1, max_len)
        yield bytes(rng.choice(b"abcd"[:sigma]) for _ in range(n))


@pytest.fixture
def example():
    g, names = example_grammar()
    occ, ci = broad_index(g)
    return g, names, occ, ci


# acceptance results: criterion number -> (passed, detail)
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, passed: bool, detail: str) -> bool:
    ACCEPTANCE[n] = (bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
