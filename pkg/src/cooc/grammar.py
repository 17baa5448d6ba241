"""Straight-line programs and run-length SLPs.

A grammar is a list of productions indexed by dense non-terminal ids.  A
leaf ``Leaf(ch)`` holds a byte value; inner rules are ``Pair(left, right)`` or
the run rule ``Power(base, exponent)``.  Terminals are bytes and live in their own
namespace, so a non-terminal id never doubles as a character.

After :func:`validate_and_index` the grammar knows every symbol's expansion
length and height, and behaves as an immutable value.
"""

from __future__ import annotations

import os
from typing import Iterable, NamedTuple, Union

from .errors import (
    BadExponent,
    CyclicGrammar,
    ExpansionTooLarge,
    GrammarError,
    MissingProduction,
    OutOfBounds,
)

DEFAULT_EXPAND_CAP = 1 << 26
MAX_LEN = (1 << 63) - 1

LEAF, PAIR, POWER = 0, 1, 2


class Leaf(NamedTuple):
    ch: int


class Pair(NamedTuple):
    left: int
    right: int


class Power(NamedTuple):
    base: int
    exponent: int


Production = Union[Leaf, Pair, Power]


def expand_cap() -> int:
    raw = os.environ.get("COOC_EXPAND_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_EXPAND_CAP


class Grammar:
    """A validated SLP or RLSLP.

    Use :func:`validate_and_index` (or :meth:`from_productions`) to build one;
    the constructor trusts its arguments.
    """

    __slots__ = ("productions", "start", "kind", "exp_len", "height", "order",
                 "_small_cache")

    def __init__(self, productions: list[Production], start: int, kind: str,
                 exp_len: list[int], height: list[int], order: list[int]):
        self.productions = productions
        self.start = start
        self.kind = kind
        self.exp_len = exp_len
        self.height = height
        self.order = order
        self._small_cache: dict[int, bytes] = {}

    @classmethod
    def from_productions(cls, productions, start: int, kind: str | None = None) -> "Grammar":
        return validate_and_index(productions, start, kind)

    # basic accessors -------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.productions)

    @property
    def n(self) -> int:
        return self.exp_len[self.start]

    def grammar_height(self) -> int:
        return self.height[self.start]

    def head(self, a: int):
        """Head symbol of ``a``; for a Leaf this is the character itself."""
        p = self.productions[a]
        if type(p) is Leaf:
            return p.ch
        return p[0]

    def head_len(self, a: int) -> int:
        p = self.productions[a]
        if type(p) is Leaf:
            return 1
        return self.exp_len[p[0]]

    def tail_len(self, a: int) -> int:
        return self.exp_len[a] - self.head_len(a)

    def is_leaf(self, a: int) -> bool:
        return type(self.productions[a]) is Leaf

    # expansion -------------------------------------------------------
    def expand(self, a: int | None = None) -> bytes:
        if a is None:
            a = self.start
        if self.exp_len[a] > expand_cap():
            raise ExpansionTooLarge(
                f"expansion of {a} has length {self.exp_len[a]} > cap {expand_cap()}")
        return self._full(a)

    def _full(self, a: int) -> bytes:
        # Short expansions are cached; they are requested over and over by
        # affix extraction and trie comparisons.
        cached = self._small_cache.get(a)
        if cached is not None:
            return cached
        p = self.productions[a]
        t = type(p)
        if t is Leaf:
            out = bytes((p.ch,))
        elif t is Pair:
            out = self._full(p.left) + self._full(p.right)
        else:
            out = self._full(p.base) * p.exponent
        if len(out) <= 4096:
            self._small_cache[a] = out
        return out

    def random_access(self, i: int, a: int | None = None) -> int:
        """Return the byte at position ``i`` of ``<a>`` (default: the text)."""
        if a is None:
            a = self.start
        if i < 0 or i >= self.exp_len[a]:
            raise OutOfBounds(f"position {i} outside [0, {self.exp_len[a]})")
        prods = self.productions
        lens = self.exp_len
        while True:
            p = prods[a]
            t = type(p)
            if t is Leaf:
                return p.ch
            if t is Pair:
                hl = lens[p.left]
                if i < hl:
                    a = p.left
                else:
                    i -= hl
                    a = p.right
            else:
                i %= lens[p.base]
                a = p.base

    def extract_affix(self, a: int, side: str, length: int) -> bytes:
        """Prefix or suffix of ``<a>`` of the given length."""
        if length < 0 or length > self.exp_len[a]:
            raise OutOfBounds(f"affix length {length} outside [0, {self.exp_len[a]}]")
        if side == "prefix":
            return self._prefix(a, length)
        if side == "suffix":
            return self._suffix(a, length)
        raise ValueError(f"side must be 'prefix' or 'suffix', not {side!r}")

    def _prefix(self, a: int, length: int) -> bytes:
        if length == 0:
            return b""
        if length == self.exp_len[a]:
            return self._full(a)
        p = self.productions[a]
        if type(p) is Pair:
            hl = self.exp_len[p.left]
            if length <= hl:
                return self._prefix(p.left, length)
            return self._full(p.left) + self._prefix(p.right, length - hl)
        # Power (a Leaf always hits one of the cases above)
        bl = self.exp_len[p.base]
        q, r = divmod(length, bl)
        out = self._full(p.base) * q if q else b""
        return out + self._prefix(p.base, r)

    def _suffix(self, a: int, length: int) -> bytes:
        if length == 0:
            return b""
        if length == self.exp_len[a]:
            return self._full(a)
        p = self.productions[a]
        if type(p) is Pair:
            tl = self.exp_len[p.right]
            if length <= tl:
                return self._suffix(p.right, length)
            return self._suffix(p.left, length - tl) + self._full(p.right)
        bl = self.exp_len[p.base]
        q, r = divmod(length, bl)
        out = self._full(p.base) * q if q else b""
        return self._suffix(p.base, r) + out

    def substring(self, a: int, start: int, end: int) -> bytes:
        """``<a>[start:end]`` without expanding the rest of ``<a>``."""
        if start < 0 or end > self.exp_len[a] or start > end:
            raise OutOfBounds(f"range [{start},{end}) invalid for length {self.exp_len[a]}")
        out = bytearray()
        self._sub(a, start, end, out)
        return bytes(out)

    def _sub(self, a: int, start: int, end: int, out: bytearray) -> None:
        if start >= end:
            return
        if start == 0 and end == self.exp_len[a]:
            out += self._full(a)
            return
        p = self.productions[a]
        if type(p) is Pair:
            hl = self.exp_len[p.left]
            if start < hl:
                self._sub(p.left, start, min(end, hl), out)
            if end > hl:
                self._sub(p.right, max(start - hl, 0), end - hl, out)
            return
        bl = self.exp_len[p.base]
        c0, c1 = start // bl, (end - 1) // bl
        if c0 == c1:
            self._sub(p.base, start - c0 * bl, end - c0 * bl, out)
            return
        self._sub(p.base, start - c0 * bl, bl, out)
        if c1 - c0 > 1:
            out += self._full(p.base) * (c1 - c0 - 1)
        self._sub(p.base, 0, end - c1 * bl, out)

    # misc ------------------------------------------------------------
    def __repr__(self) -> str:
        return f"Grammar(kind={self.kind}, g={self.size}, N={self.n}, height={self.grammar_height()})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Grammar) and self.kind == other.kind
                and self.start == other.start and self.productions == other.productions)

    def __hash__(self):
        return hash((self.kind, self.start, tuple(self.productions)))


def _as_list(productions) -> list[Production]:
    if isinstance(productions, dict):
        if not productions:
            raise MissingProduction("grammar has no productions")
        g = max(productions) + 1
        missing = [i for i in range(g) if i not in productions]
        if missing or min(productions) < 0:
            raise MissingProduction(f"no production for non-terminal(s) {missing[:5]}")
        return [productions[i] for i in range(g)]
    return list(productions)


def validate_and_index(productions, start: int, kind: str | None = None) -> Grammar:
    """Check a production table and derive per-symbol lengths and heights bottom-up.

    ``productions`` may be a list indexed by id or a dict id -> production.
    ``kind`` defaults to RLSLP when any Power rule is present.
    """
    prods = _as_list(productions)
    g = len(prods)
    if not (0 <= start < g):
        raise MissingProduction(f"start symbol {start} has no production")
    has_power = False
    for i, p in enumerate(prods):
        if type(p) is Leaf:
            if not (0 <= p.ch <= 255):
                raise GrammarError(f"leaf {i} has non-byte character {p.ch}")
            continue
        if type(p) is Pair:
            kids = (p.left, p.right)
        elif type(p) is Power:
            has_power = True
            if p.exponent < 2:
                raise BadExponent(f"production {i} has exponent {p.exponent} < 2")
            kids = (p.base,)
        else:
            raise GrammarError(f"production {i} has unknown type {type(p).__name__}")
        for c in kids:
            if not (0 <= c < g):
                raise MissingProduction(f"production {i} refers to undefined symbol {c}")
    if kind is None:
        kind = "RLSLP" if has_power else "SLP"
    if kind not in ("SLP", "RLSLP"):
        raise GrammarError(f"unknown grammar kind {kind!r}")
    if kind == "SLP" and has_power:
        raise GrammarError("Power productions are only allowed in an RLSLP")

    # iterative DFS topological sort with cycle detection
    state = [0] * g          # 0 new, 1 on stack, 2 done
    order: list[int] = []
    for root in range(g):
        if state[root]:
            continue
        stack = [(root, 0)]
        state[root] = 1
        while stack:
            node, idx = stack[-1]
            p = prods[node]
            kids = () if type(p) is Leaf else ((p.left, p.right) if type(p) is Pair else (p.base,))
            if idx < len(kids):
                stack[-1] = (node, idx + 1)
                c = kids[idx]
                if state[c] == 1:
                    raise CyclicGrammar(f"cycle through symbol {c}")
                if state[c] == 0:
                    state[c] = 1
                    stack.append((c, 0))
            else:
                state[node] = 2
                order.append(node)
                stack.pop()

    exp_len = [0] * g
    height = [0] * g
    for a in order:
        p = prods[a]
        if type(p) is Leaf:
            exp_len[a] = 1
            height[a] = 1
        elif type(p) is Pair:
            exp_len[a] = exp_len[p.left] + exp_len[p.right]
            height[a] = 1 + max(height[p.left], height[p.right])
        else:
            exp_len[a] = exp_len[p.base] * p.exponent
            height[a] = 1 + height[p.base]
        if exp_len[a] > MAX_LEN:
            raise ExpansionTooLarge(f"expansion length of {a} exceeds 2^63-1")
    return Grammar(prods, start, kind, exp_len, height, order)


# ----------------------------------------------------------------------
# text format


def _quote(ch: int) -> str:
    c = chr(ch)
    if 32 <= ch < 127 and c not in "'\\":
        return f"'{c}'"
    return f"'\\x{ch:02x}'"


def _unquote(tok: str, lineno: int) -> int:
    if len(tok) < 3 or tok[0] != "'" or tok[-1] != "'":
        raise GrammarError(f"line {lineno}: bad character literal {tok!r}")
    body = tok[1:-1]
    if len(body) == 1:
        return ord(body)
    if body.startswith("\\x") and len(body) == 4:
        return int(body[2:], 16)
    if body in ("\\\\", "\\'"):
        return ord(body[1])
    if body == "\\n":
        return 10
    if body == "\\t":
        return 9
    raise GrammarError(f"line {lineno}: bad character literal {tok!r}")


def _strip_comment(line: str) -> str:
    quoted = False
    i = 0
    while i < len(line):
        c = line[i]
        if quoted and c == "\\":
            i += 2
            continue
        if c == "'":
            quoted = not quoted
        elif c == "#" and not quoted:
            return line[:i]
        i += 1
    return line


def dumps(g: Grammar) -> str:
    header = "SLPX" if g.kind == "SLP" else "RLSLP"
    lines = [f"{header} {g.size} {g.start}"]
    for i, p in enumerate(g.productions):
        if type(p) is Leaf:
            lines.append(f"{i} = {_quote(p.ch)}")
        elif type(p) is Pair:
            lines.append(f"{i} = {p.left} {p.right}")
        else:
            lines.append(f"{i} = {p.base} ^ {p.exponent}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Grammar:
    header = None
    prods: dict[int, Production] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = _strip_comment(raw).strip()
        if not body:
            continue
        if header is None:
            parts = body.split()
            if len(parts) != 3 or parts[0] not in ("SLP", "SLPX", "RLSLP"):
                raise GrammarError(f"line {lineno}: expected 'SLP|RLSLP <g> <start>' header")
            header = ("RLSLP" if parts[0] == "RLSLP" else "SLP", int(parts[1]), int(parts[2]))
            continue
        if "=" not in body:
            raise GrammarError(f"line {lineno}: expected 'id = ...'")
        lhs, rhs = body.split("=", 1)
        ident = int(lhs.strip())
        rhs = rhs.strip()
        if ident in prods:
            raise GrammarError(f"line {lineno}: second production for {ident}")
        if rhs.startswith("'"):
            prods[ident] = Leaf(_unquote(rhs, lineno))
        elif "^" in rhs:
            b, k = rhs.split("^")
            prods[ident] = Power(int(b), int(k))
        else:
            parts = rhs.split()
            if len(parts) != 2:
                raise GrammarError(f"line {lineno}: expected two symbols")
            prods[ident] = Pair(int(parts[0]), int(parts[1]))
    if header is None:
        raise GrammarError("empty grammar file")
    kind, count, start = header
    g = validate_and_index(prods, start, kind)
    if g.size != count:
        raise GrammarError(f"header announces {count} productions, found {g.size}")
    return g


def from_nested(spec: Iterable) -> Grammar:
    """Tiny helper for tests: build a grammar from a list of productions, last is start."""
    prods = list(spec)
    return validate_and_index(prods, len(prods) - 1)
