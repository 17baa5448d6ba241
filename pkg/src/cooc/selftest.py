"""Randomised differential checks of every index against the naive oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from . import oracle
from .coindex import build_co_index, query_close
from .compress import compute_splits, recompress_text
from .indexfile import dump_index, load_index
from .occindex import build_occ_index, preprocess_pattern, report_co_occurrences

NAIVE_SPLIT_LIMIT = 300


@dataclass
class Failure:
    check: str
    text: bytes
    p1: bytes
    p2: bytes
    b: int
    detail: str

    def repro(self) -> str:
        return (f"check={self.check} text={self.text!r} p1={self.p1!r} p2={self.p2!r} "
                f"b={self.b}\n  {self.detail}")


def _patterns(rng: random.Random, text: bytes, alphabet: bytes) -> tuple[bytes, bytes]:
    def one() -> bytes:
        if rng.random() < 0.8:
            i = rng.randrange(len(text))
            return text[i:i + rng.randint(1, 6)]
        return bytes(rng.choice(alphabet) for _ in range(rng.randint(1, 4)))
    return one(), one()


def check_case(text: bytes, p1: bytes, p2: bytes, b: int, seed: int = 0,
               fault: Callable | None = None) -> Failure | None:
    """Run every differential check on one (text, P1, P2, b); None when all agree."""
    g, scheme = recompress_text(text, seed)
    if g.expand() != text:
        return Failure("expand", text, p1, p2, b, "grammar does not spell the text")
    occ = build_occ_index(g, scheme, seed=seed)
    ci = build_co_index(occ)
    if len(text) <= NAIVE_SPLIT_LIMIT:
        for p in (p1, p2):
            fast = compute_splits(g, scheme, p)
            truth = oracle.naive_splits(g, p)
            if hasattr(fast, "splits"):
                missing = set(truth.splits) - set(fast.splits)
                if missing:
                    return Failure("splits", text, p1, p2, b, f"missing splits {sorted(missing)} for {p!r}")
            elif truth.splits or p in text:
                return Failure("splits", text, p1, p2, b, f"certificate for occurring pattern {p!r}")
    got = query_close(ci, p1, p2, b)
    if fault is not None:
        got = fault(got)
    want = oracle.naive_b_close(text, p1, p2, b)
    if got != want:
        return Failure("query_close", text, p1, p2, b, f"got {got[:8]} want {want[:8]}")
    h1, h2 = preprocess_pattern(occ, p1), preprocess_pattern(occ, p2)
    got = report_co_occurrences(occ, h1, h2)
    want = oracle.naive_co_occurrences(text, p1, p2)
    if got != want:
        return Failure("report_co_occurrences", text, p1, p2, b, f"got {got[:8]} want {want[:8]}")
    blob = dump_index(ci)
    ci2 = load_index(blob)
    if dump_index(ci2) != blob:
        return Failure("roundtrip", text, p1, p2, b, "re-serialization differs")
    if query_close(ci2, p1, p2, b) != oracle.naive_b_close(text, p1, p2, b):
        return Failure("roundtrip", text, p1, p2, b, "loaded index answers differently")
    return None


def minimize(f: Failure, seed: int = 0, fault: Callable | None = None, budget: int = 400) -> Failure:
    """Greedy deletion of text and pattern characters while the failure persists."""
    best = f
    spent = 0
    changed = True
    while changed and spent < budget:
        changed = False
        for field_name in ("text", "p1", "p2"):
            i = 0
            while i < len(getattr(best, field_name)) and spent < budget:
                cur = getattr(best, field_name)
                if len(cur) == 1:
                    break
                trial = dict(text=best.text, p1=best.p1, p2=best.p2)
                trial[field_name] = cur[:i] + cur[i + 1:]
                spent += 1
                res = check_case(trial["text"], trial["p1"], trial["p2"], best.b, seed, fault)
                if res is not None:
                    best = res
                    changed = True
                else:
                    i += 1
        for b in (0, best.b // 2):
            if b < best.b and spent < budget:
                spent += 1
                res = check_case(best.text, best.p1, best.p2, b, seed, fault)
                if res is not None:
                    best = res
                    changed = True
    return best


def drop_first(result):
    """Fault used by the harness test: lose one reported pair."""
    return result[1:]


def run_selftest(n: int, maxlen: int, seed: int, fault: Callable | None = None,
                 log: Callable[[str], None] = lambda s: None) -> Failure | None:
    rng = random.Random(seed)
    for case in range(n):
        sigma = rng.randint(1, 4)
        alphabet = b"abcd"[:sigma]
        length = rng.randint(1, max(1, maxlen))
        text = bytes(rng.choice(alphabet) for _ in range(length))
        p1, p2 = _patterns(rng, text, alphabet)
        b = rng.choice([0, 1, 2, 5, length])
        res = check_case(text, p1, p2, b, case, fault)
        if res is not None:
            log(f"case {case}: {res.check} mismatch, minimizing")
            return minimize(res, case, fault)
    return None
