"""On-disk index container.

Layout (little endian)::

    magic "COOCIDX\\0" | version u32 | section count u32
    per section: name length u16 | name | payload length u64 | crc32 u32 | payload

Payloads are canonical JSON (sorted keys, no whitespace), so writing a loaded
index reproduces the input byte for byte.
"""

from __future__ import annotations

import json
import struct
import zlib

from .coindex import CoIndex
from .compress import LevelScheme
from .errors import GrammarError, IndexFormatError
from .fingerprint import FingerprintParams
from .grammar import dumps as dump_grammar
from .grammar import loads as load_grammar
from .occindex import OccIndex

MAGIC = b"COOCIDX\0"
VERSION = 1
SECTIONS = ("meta", "grammar", "scheme", "params", "occindex", "coindex")

_HEAD = struct.Struct("<8sII")
_SEC = struct.Struct("<QI")


def _canon(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def dump_index(ci: CoIndex, with_quadruples: bool = True) -> bytes:
    occ = ci.occ
    g = occ.g
    payloads = {
        "meta": {"n": g.n, "size": g.size, "kind": g.kind},
        "grammar": dump_grammar(g),
        "scheme": occ.scheme.to_json(),
        "params": {"p": str(occ.params.p), "r": str(occ.params.r)},
        "occindex": occ.to_tables(),
        "coindex": ci.to_tables(with_quadruples),
    }
    out = [_HEAD.pack(MAGIC, VERSION, len(SECTIONS))]
    for name in SECTIONS:
        body = _canon(payloads[name])
        tag = name.encode()
        out.append(struct.pack("<H", len(tag)) + tag)
        out.append(_SEC.pack(len(body), zlib.crc32(body)))
        out.append(body)
    return b"".join(out)


def _sections(data: bytes) -> dict:
    if len(data) < _HEAD.size:
        raise IndexFormatError("file too short for an index header")
    magic, version, count = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise IndexFormatError("not a cooc index (bad magic)")
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    pos = _HEAD.size
    found = {}
    for _ in range(count):
        try:
            (nlen,) = struct.unpack_from("<H", data, pos)
            pos += 2
            name = data[pos:pos + nlen].decode()
            pos += nlen
            size, crc = _SEC.unpack_from(data, pos)
        except (struct.error, UnicodeDecodeError):
            raise IndexFormatError("truncated section header") from None
        pos += _SEC.size
        body = data[pos:pos + size]
        pos += size
        if len(body) != size:
            raise IndexFormatError(f"section {name!r} is truncated")
        if zlib.crc32(body) != crc:
            raise IndexFormatError(f"checksum mismatch in section {name!r}")
        try:
            found[name] = json.loads(body)
        except ValueError:
            raise IndexFormatError(f"section {name!r} is not valid JSON") from None
    if pos != len(data):
        raise IndexFormatError("trailing bytes after the last section")
    missing = [s for s in SECTIONS if s not in found]
    if missing:
        raise IndexFormatError(f"missing sections: {', '.join(missing)}")
    return found


def load_index(data: bytes) -> CoIndex:
    sec = _sections(data)
    try:
        g = load_grammar(sec["grammar"])
        scheme = LevelScheme.from_json(sec["scheme"])
        params = FingerprintParams(int(sec["params"]["p"]), int(sec["params"]["r"]))
        meta = sec["meta"]
        if meta != {"n": g.n, "size": g.size, "kind": g.kind}:
            raise IndexFormatError("metadata does not match the stored grammar")
        occ_t = sec["occindex"]
        occ = OccIndex(g, scheme, params, occ_t["split_mode"], tables=occ_t)
        return CoIndex(occ, tables=sec["coindex"])
    except IndexFormatError:
        raise
    except (GrammarError, KeyError, TypeError, ValueError, IndexError) as e:
        raise IndexFormatError(f"inconsistent index contents: {e}") from None


def write_index(path, ci: CoIndex, with_quadruples: bool = True) -> None:
    with open(path, "wb") as f:
        f.write(dump_index(ci, with_quadruples))


def read_index(path) -> CoIndex:
    with open(path, "rb") as f:
        return load_index(f.read())
