"""Karp-Rabin fingerprints of grammar affixes.

A fingerprint of X is ``phi = sum X[k] * r**k mod p`` together with
``|X|`` and the powers ``r**|X|`` and ``r**-|X|``.  Keeping both powers makes
concatenation and removal of a known prefix or suffix constant time.

We store ``r**|X|`` rather than ``r**(|X|-1)``: the empty string then has a
well-defined fingerprint and the formulas lose their off-by-one terms.
"""

from __future__ import annotations

import random
from typing import Iterable, NamedTuple

from .errors import LengthMismatch, OutOfBounds, ParamSearchExhausted
from .grammar import Grammar, Leaf, Pair

MERSENNE61 = (1 << 61) - 1
PARAM_ATTEMPTS = 16


class FingerprintParams(NamedTuple):
    p: int
    r: int

    @property
    def r_inv(self) -> int:
        return pow(self.r, -1, self.p)


class Fingerprint(NamedTuple):
    phi: int
    rpow: int      # r ** len mod p
    irpow: int     # r ** -len mod p
    length: int


EMPTY = Fingerprint(0, 1, 1, 0)


def fp_of_bytes(params: FingerprintParams, x: bytes) -> Fingerprint:
    p, r = params
    phi = 0
    for c in reversed(x):
        phi = (phi * r + c) % p
    n = len(x)
    rp = pow(r, n, p)
    return Fingerprint(phi, rp, pow(rp, -1, p) if n else 1, n)


def fp_char(params: FingerprintParams, c: int) -> Fingerprint:
    p, r = params
    return Fingerprint(c % p, r % p, pow(r, -1, p), 1)


def fp_combine(params: FingerprintParams, fx: Fingerprint, fy: Fingerprint) -> Fingerprint:
    p = params.p
    return Fingerprint((fx.phi + fx.rpow * fy.phi) % p, fx.rpow * fy.rpow % p,
                       fx.irpow * fy.irpow % p, fx.length + fy.length)


def fp_remove_prefix(params: FingerprintParams, fz: Fingerprint, fx: Fingerprint) -> Fingerprint:
    """Fingerprint of Y where Z = XY and X is known."""
    if fx.length > fz.length:
        raise LengthMismatch("prefix longer than the whole string")
    p = params.p
    return Fingerprint((fz.phi - fx.phi) * fx.irpow % p, fz.rpow * fx.irpow % p,
                       fz.irpow * fx.rpow % p, fz.length - fx.length)


def fp_remove_suffix(params: FingerprintParams, fz: Fingerprint, fy: Fingerprint) -> Fingerprint:
    """Fingerprint of X where Z = XY and Y is known."""
    if fy.length > fz.length:
        raise LengthMismatch("suffix longer than the whole string")
    p = params.p
    rx = fz.rpow * fy.irpow % p
    return Fingerprint((fz.phi - rx * fy.phi) % p, rx, fz.irpow * fy.rpow % p,
                       fz.length - fy.length)


def fp_subtract(params: FingerprintParams, fz: Fingerprint, known: Fingerprint,
                known_is_prefix: bool = True) -> Fingerprint:
    if known_is_prefix:
        return fp_remove_prefix(params, fz, known)
    return fp_remove_suffix(params, fz, known)


def fp_power(params: FingerprintParams, f: Fingerprint, q: int) -> Fingerprint:
    """Fingerprint of X repeated q times, by doubling."""
    out = EMPTY
    base = f
    while q:
        if q & 1:
            out = fp_combine(params, out, base)
        q >>= 1
        if q:
            base = fp_combine(params, base, base)
    return out


class GrammarFingerprints:
    """Fingerprints of grammar expansions and their affixes.

    Both the forward view and the reversed view (Pair(B, C) read as (C, B)) are
    supported; the reversed view yields fingerprints of reversed expansions.
    """

    def __init__(self, g: Grammar, params: FingerprintParams):
        self.g = g
        self.params = params
        fwd: list = [None] * g.size
        rev: list = [None] * g.size
        for a in g.order:
            pr = g.productions[a]
            if type(pr) is Leaf:
                f = fp_char(params, pr.ch)
                fwd[a] = rev[a] = f
            elif type(pr) is Pair:
                fwd[a] = fp_combine(params, fwd[pr.left], fwd[pr.right])
                rev[a] = fp_combine(params, rev[pr.right], rev[pr.left])
            else:
                fwd[a] = fp_power(params, fwd[pr.base], pr.exponent)
                rev[a] = fp_power(params, rev[pr.base], pr.exponent)
        self.full = fwd
        self.full_rev = rev

    def prefix(self, a: int, length: int, reverse: bool = False) -> Fingerprint:
        """Fingerprint of the length-``length`` prefix of <a> (or of rev(<a>))."""
        g = self.g
        if length < 0 or length > g.exp_len[a]:
            raise OutOfBounds(f"prefix length {length} outside [0, {g.exp_len[a]}]")
        params = self.params
        full = self.full_rev if reverse else self.full
        acc = EMPTY
        prods = g.productions
        lens = g.exp_len
        while length:
            if length == lens[a]:
                return fp_combine(params, acc, full[a])
            pr = prods[a]
            if type(pr) is Pair:
                first, second = (pr.right, pr.left) if reverse else (pr.left, pr.right)
                fl = lens[first]
                if length <= fl:
                    a = first
                else:
                    acc = fp_combine(params, acc, full[first])
                    length -= fl
                    a = second
            else:
                bl = lens[pr.base]
                q, length = divmod(length, bl)
                if q:
                    acc = fp_combine(params, acc, fp_power(params, full[pr.base], q))
                a = pr.base
        return acc

    def suffix(self, a: int, length: int, reverse: bool = False) -> Fingerprint:
        """Fingerprint of the length-``length`` suffix of <a> (or of rev(<a>))."""
        n = self.g.exp_len[a]
        if length < 0 or length > n:
            raise OutOfBounds(f"suffix length {length} outside [0, {n}]")
        full = self.full_rev[a] if reverse else self.full[a]
        if length == n:
            return full
        return fp_remove_prefix(self.params, full, self.prefix(a, n - length, reverse))

    def affix(self, a: int, side: str, reverse: bool, length: int) -> Fingerprint:
        if side == "prefix":
            return self.prefix(a, length, reverse)
        if side == "suffix":
            return self.suffix(a, length, reverse)
        raise ValueError(f"side must be 'prefix' or 'suffix', not {side!r}")

    def power_prefix(self, a: int, count: int, length: int, reverse: bool = False) -> Fingerprint:
        """Prefix of <a>^count (or rev(<a>)^count) of the given length."""
        bl = self.g.exp_len[a]
        if length < 0 or length > bl * count:
            raise OutOfBounds(f"prefix length {length} outside [0, {bl * count}]")
        q, rem = divmod(length, bl)
        full = self.full_rev[a] if reverse else self.full[a]
        head = fp_power(self.params, full, q) if q else EMPTY
        return fp_combine(self.params, head, self.prefix(a, rem, reverse)) if rem else head


def fp_affix(g: Grammar, params: FingerprintParams, a: int, side: str, reverse: bool,
             length: int) -> Fingerprint:
    return GrammarFingerprints(g, params).affix(a, side, reverse, length)


def random_params(rng: random.Random, p: int = MERSENNE61) -> FingerprintParams:
    return FingerprintParams(p, rng.randint(2, p - 2))


def verify_no_collisions(params: FingerprintParams, strings: Iterable[bytes]) -> bool:
    """True iff no two different equal-length prefixes share a fingerprint.

    Prefix classes come from the sorted order: two prefixes of length l are
    equal iff the strings agree on their first l characters, which for sorted
    neighbours is an LCP comparison.
    """
    p, r = params
    seen: set[tuple[int, int]] = set()
    prev = b""
    for s in sorted(set(strings)):
        lcp = 0
        lim = min(len(s), len(prev))
        while lcp < lim and s[lcp] == prev[lcp]:
            lcp += 1
        # prefixes up to lcp were already registered by the previous string
        phi = 0
        rk = 1
        for l in range(1, len(s) + 1):
            phi = (phi + s[l - 1] * rk) % p
            rk = rk * r % p
            if l > lcp:
                key = (l, phi)
                if key in seen:
                    return False
                seen.add(key)
        prev = s
    return True


def choose_params(strings: Iterable[bytes], seed: int = 0, p: int = MERSENNE61,
                  attempts: int = PARAM_ATTEMPTS, r_values: Iterable[int] | None = None
                  ) -> FingerprintParams:
    """Pick parameters with no unequal-string collision among all prefixes.

    ``r_values`` forces the candidate sequence (used to exercise the retry
    path with a tiny modulus).
    """
    strings = list(strings)
    rng = random.Random(seed)
    candidates = iter(r_values) if r_values is not None else None
    for _ in range(attempts):
        if candidates is not None:
            try:
                r = next(candidates)
            except StopIteration:
                break
            params = FingerprintParams(p, r)
        else:
            params = random_params(rng, p)
        if verify_no_collisions(params, strings):
            return params
    raise ParamSearchExhausted(f"no collision-free parameters found for modulus {p}")
