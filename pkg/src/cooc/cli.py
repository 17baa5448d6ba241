"""``cooc`` command line: build, index, query, selftest, bench.

Exit status is 0 on success, 1 when a self-test finds a mismatch and 2 for
usage or input/output errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .coindex import EAGER_CAP, build_co_index, query_close
from .compress import build_slp, dump_grammar_file, load_grammar_file, recompress_text, to_rlslp
from .errors import CoocError
from .indexfile import read_index, write_index
from .occindex import build_occ_index, preprocess_pattern, report_co_occurrences

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def _err(msg: str) -> None:
    print(f"cooc: {msg}", file=sys.stderr)


def cmd_build(args) -> int:
    with open(args.input, "rb") as f:
        text = f.read()
    rl, scheme = recompress_text(text, args.seed)
    if args.rlslp:
        out, body = rl, dump_grammar_file(rl, scheme)
        slp_size = None
    else:
        out = build_slp(text)
        body = dump_grammar_file(out)
        slp_size = out.size
    with open(args.output, "w") as f:
        f.write(body)
    if slp_size is not None:
        print(f"g\t{slp_size}")
    print(f"g'\t{rl.size}")
    print(f"N\t{out.n}")
    print(f"height\t{out.grammar_height()}")
    return EXIT_OK


def cmd_index(args) -> int:
    with open(args.grammar) as f:
        g, scheme = load_grammar_file(f.read())
    if g.kind != "RLSLP" or scheme is None:
        if g.kind == "RLSLP":
            _err("RLSLP without a stored scheme; recompressing its expansion")
        g, scheme = to_rlslp(g, args.seed)
    occ = build_occ_index(g, scheme, seed=args.seed)
    ci = build_co_index(occ, eager=args.eager is not None, cap=args.eager or EAGER_CAP)
    write_index(args.output, ci)
    print(f"g'\t{g.size}\nN\t{g.n}\nbase_points\t{occ.num_points}")
    return EXIT_OK


def _pattern(literal, path, which: str) -> bytes:
    if path is not None:
        with open(path, "rb") as f:
            return f.read()
    if literal is None:
        raise _Usage(f"missing {which} (give it literally or with --{which}-file)")
    return os.fsencode(literal)


class _Usage(Exception):
    pass


def cmd_query(args) -> int:
    lits = list(args.patterns)
    p1 = _pattern(lits.pop(0) if lits and args.p1_file is None else None, args.p1_file, "p1")
    p2 = _pattern(lits.pop(0) if lits and args.p2_file is None else None, args.p2_file, "p2")
    if lits:
        raise _Usage("too many pattern arguments")
    ci = read_index(args.index)
    if args.all:
        occ = ci.occ
        for p in (p1, p2):
            if not p:
                preprocess_pattern(occ, p)     # raises EmptyPattern
        pairs = report_co_occurrences(occ, preprocess_pattern(occ, p1), preprocess_pattern(occ, p2))
    else:
        pairs = query_close(ci, p1, p2, args.b)
    out = sys.stdout
    for q1, q2 in sorted(pairs):
        out.write(f"{q1}\t{q2}\n")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import drop_first, run_selftest
    fault = drop_first if args.inject_fault else None
    res = run_selftest(args.n, args.maxlen, args.seed, fault, log=_err)
    if res is not None:
        _err("mismatch; minimized repro:")
        print(res.repro(), file=sys.stderr)
        return EXIT_MISMATCH
    print(f"selftest\t{args.n} cases\tok")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench
    rows = run_bench(args.out, args.max_exp, args.queries, args.seed, log=_err)
    print(f"wrote {len(rows)} rows to {os.path.join(args.out, 'bench.tsv')}")
    return EXIT_OK


def _eager(raw: str) -> int:
    try:
        cap = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError("cap must be an integer") from None
    if cap < 0:
        raise argparse.ArgumentTypeError("cap must be non-negative")
    return cap


def _nonneg(raw: str) -> int:
    try:
        v = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {raw!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cooc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("build", help="compress a text file into a grammar file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--rlslp", action="store_true", help="write the run-length grammar and its scheme")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("index", help="build and serialize the indexes for a grammar file")
    p.add_argument("grammar")
    p.add_argument("output")
    p.add_argument("--eager", nargs="?", type=_eager, const=EAGER_CAP, default=None,
                   metavar="CAP", help="precompute every quadruple record (refused above CAP)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="report co-occurrences of two patterns")
    p.add_argument("index")
    p.add_argument("patterns", nargs="*", metavar="P")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--b", type=_nonneg, help="report b-close co-occurrences")
    mode.add_argument("--all", action="store_true", help="report every co-occurrence")
    p.add_argument("--p1-file")
    p.add_argument("--p2-file")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("selftest", help="differential test against the naive oracle")
    p.add_argument("--n", type=_nonneg, default=200)
    p.add_argument("--maxlen", type=_nonneg, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="write scaling measurements (TSV and PNG) to a directory")
    p.add_argument("--out", default="bench-out")
    p.add_argument("--max-exp", type=int, default=6, help="largest N is 10**max_exp")
    p.add_argument("--queries", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        # literal patterns may follow --p1-file/--p2-file
        if args.cmd != "query" or any(x.startswith("--") for x in extra):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
        args.patterns = list(args.patterns) + extra
    try:
        return args.func(args)
    except _Usage as e:
        _err(str(e))
    except OSError as e:
        _err(f"{e.filename or ''}: {e.strerror or e}")
    except CoocError as e:
        _err(f"{type(e).__name__}: {e}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
