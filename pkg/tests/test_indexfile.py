import pytest

from cooc import oracle
from cooc.coindex import build_co_index, query_close
from cooc.errors import IndexFormatError
from cooc.indexfile import MAGIC, dump_index, load_index
from cooc.occindex import build_occ_index

from conftest import EXAMPLE, text_index

TEXT = EXAMPLE * 7 + b"abcabd"
PAIRS = [(b"ab", b"ac"), (b"a", b"c"), (b"bab", b"ca"), (b"aba", b"ba"), (b"d", b"a")]


@pytest.fixture(scope="module")
def blob():
    _, _, ci = text_index(TEXT)
    for p1, p2 in PAIRS:
        query_close(ci, p1, p2, 5)            # memoise some quadruples
    return dump_index(ci)


def test_round_trip_is_byte_identical(blob):
    assert blob.startswith(MAGIC)
    assert dump_index(load_index(blob)) == blob


def test_loaded_index_answers_the_same(blob):
    ci = load_index(blob)
    for p1, p2 in PAIRS:
        for b in (0, 3, len(TEXT)):
            assert query_close(ci, p1, p2, b) == oracle.naive_b_close(TEXT, p1, p2, b)


def test_without_quadruples_still_answers():
    g, occ, ci = text_index(TEXT)
    query_close(ci, b"ab", b"ca", 4)
    ci2 = load_index(dump_index(ci, with_quadruples=False))
    assert query_close(ci2, b"ab", b"ca", 4) == oracle.naive_b_close(TEXT, b"ab", b"ca", 4)


def test_eager_index_round_trips():
    g, occ, _ = text_index(b"abcab")
    ci = build_co_index(build_occ_index(g, occ.scheme), eager=True)
    blob = dump_index(ci)
    assert dump_index(load_index(blob)) == blob


@pytest.mark.parametrize("where", [0, 9, 40, -3])
def test_corruption_detected(blob, where):
    bad = bytearray(blob)
    bad[where] ^= 0x20
    with pytest.raises(IndexFormatError):
        load_index(bytes(bad))


def test_truncation_and_trailing_bytes(blob):
    with pytest.raises(IndexFormatError):
        load_index(blob[:-1])
    with pytest.raises(IndexFormatError):
        load_index(blob + b"\0")
    with pytest.raises(IndexFormatError):
        load_index(b"")
