import os
import subprocess
import sys

import pytest

from cooc.cli import main
from cooc.compress import C_0, C_H

from conftest import EXAMPLE


@pytest.fixture
def files(tmp_path):
    txt = tmp_path / "s.txt"
    txt.write_bytes(EXAMPLE)
    return tmp_path, txt


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def build_index(capsys, tmp, txt, *extra):
    assert run(capsys, "build", txt, tmp / "g.txt", "--rlslp")[0] == 0
    code, out, _ = run(capsys, "index", tmp / "g.txt", tmp / "s.idx", *extra)
    assert code == 0
    return tmp / "s.idx"


def test_build_reports_length(capsys, files):
    tmp, txt = files
    code, out, _ = run(capsys, "build", txt, tmp / "g.txt")
    assert code == 0 and "N\t12" in out.splitlines()


def test_build_unary_text_height(capsys, tmp_path):
    src = tmp_path / "a.txt"
    src.write_bytes(b"a" * 1024)
    code, out, _ = run(capsys, "build", src, tmp_path / "g.txt", "--rlslp")
    height = int(dict(line.split("\t") for line in out.splitlines())["height"])
    assert code == 0 and height <= C_H * 10 + C_0


def test_missing_input_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "build", tmp_path / "nope", tmp_path / "g.txt")
    assert code == 2 and "nope" in err


def test_query_examples(capsys, files):
    tmp, txt = files
    idx = build_index(capsys, tmp, txt)
    assert run(capsys, "query", idx, "ab", "ac", "--b", 2)[1] == "3\t5\n"
    assert run(capsys, "query", idx, "a", "c", "--all")[1] == "5\t6\n7\t8\n9\t11\n"
    code, out, _ = run(capsys, "query", idx, "ab", "zz", "--b", 5)
    assert code == 0 and out == ""


def test_query_from_pattern_files(capsys, files):
    tmp, txt = files
    idx = build_index(capsys, tmp, txt)
    (tmp / "p1").write_bytes(b"ab")
    assert run(capsys, "query", idx, "--p1-file", tmp / "p1", "ac", "--b", 2)[1] == "3\t5\n"


def test_query_usage_errors(capsys, files):
    tmp, txt = files
    idx = build_index(capsys, tmp, txt)
    assert run(capsys, "query", idx, "ab", "--b", 2)[0] == 2
    assert run(capsys, "query", idx, "", "a", "--all")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["query", str(idx), "a", "b"])
    assert e.value.code == 2


def test_eager_index(capsys, tmp_path):
    src = tmp_path / "t.txt"
    src.write_bytes(b"ab")
    idx = build_index(capsys, tmp_path, src, "--eager")
    assert run(capsys, "query", idx, "a", "b", "--b", 1)[1] == "0\t1\n"


def test_eager_cap_refused(capsys, files):
    tmp, txt = files
    run(capsys, "build", txt, tmp / "g.txt", "--rlslp")
    code, _, err = run(capsys, "index", tmp / "g.txt", tmp / "s.idx", "--eager=1")
    assert code == 2 and "EagerTooLarge" in err


def test_plain_slp_is_recompressed(capsys, files):
    tmp, txt = files
    run(capsys, "build", txt, tmp / "g.txt")
    assert run(capsys, "index", tmp / "g.txt", tmp / "s.idx")[0] == 0
    assert run(capsys, "query", tmp / "s.idx", "ab", "ac", "--b", 2)[1] == "3\t5\n"


def test_corrupt_index_exits_two(capsys, files):
    tmp, txt = files
    idx = build_index(capsys, tmp, txt)
    data = bytearray(idx.read_bytes())
    data[-2] ^= 1
    idx.write_bytes(bytes(data))
    code, _, err = run(capsys, "query", idx, "a", "b", "--all")
    assert code == 2 and "checksum" in err


def test_selftest_modes(capsys):
    assert run(capsys, "selftest")[0] == 0
    assert run(capsys, "selftest", "--n", 0)[0] == 0
    code, _, err = run(capsys, "selftest", "--n", 20, "--inject-fault")
    assert code == 1 and "repro" in err


def test_expand_cap_variable(capsys, files, monkeypatch):
    tmp, txt = files
    run(capsys, "build", txt, tmp / "g.txt")
    monkeypatch.setenv("COOC_EXPAND_CAP", "4")
    # a plain SLP is expanded before recompression, which the cap forbids
    code, _, err = run(capsys, "index", tmp / "g.txt", tmp / "s.idx")
    assert code == 2 and "ExpansionTooLarge" in err
    monkeypatch.delenv("COOC_EXPAND_CAP")
    assert run(capsys, "index", tmp / "g.txt", tmp / "s.idx")[0] == 0


def test_console_entry_point(files):
    tmp, txt = files
    proc = subprocess.run([sys.executable, "-m", "cooc.cli", "build", str(txt), str(tmp / "g.txt")],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 0 and "N\t12" in proc.stdout


def test_bench_writes_table_and_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--out", tmp_path / "b", "--max-exp", 3, "--queries", 3)
    assert code == 0
    rows = (tmp_path / "b" / "bench.tsv").read_text().splitlines()
    assert len(rows) > 1 and "\t" in rows[0]
    for name in ("height.png", "points.png", "query_time.png"):
        assert (tmp_path / "b" / name).read_bytes().startswith(b"\x89PNG")
