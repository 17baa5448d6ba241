"""Scaling measurements: grammar height, point counts and query time."""

from __future__ import annotations

import csv
import math
import os
import random
import time

from .coindex import build_co_index, query_close
from .compress import height_bound, recompress_text, to_rlslp
from .corpora import fibonacci_slp, fibonacci_word, random_text, thue_morse_slp, thue_morse_word
from .occindex import build_occ_index

FIELDS = ["family", "n", "g_rlslp", "height", "height_bound", "base_points", "frontier_points",
          "point_bound", "build_s", "queries", "query_s", "outputs"]


def _measure(family: str, g, n_queries: int, rng: random.Random, text_of) -> dict:
    t0 = time.perf_counter()
    rl, scheme = to_rlslp(g)
    occ = build_occ_index(rl, scheme)
    ci = build_co_index(occ)
    build_s = time.perf_counter() - t0
    n = rl.n
    text = text_of(n)
    outputs = 0
    t0 = time.perf_counter()
    for _ in range(n_queries):
        pats = []
        for _ in range(2):
            m = min(n, rng.randint(4, 16))
            i = rng.randrange(n - m + 1)
            pats.append(text[i:i + m])
        outputs += len(query_close(ci, pats[0], pats[1], rng.randint(0, 64)))
    query_s = time.perf_counter() - t0
    return {
        "family": family, "n": n, "g_rlslp": rl.size, "height": rl.grammar_height(),
        "height_bound": round(height_bound(n), 3), "base_points": occ.num_points,
        "frontier_points": occ.build_all_point_stores(), "point_bound": round(occ.point_bound, 3),
        "build_s": round(build_s, 4), "queries": n_queries, "query_s": round(query_s, 4),
        "outputs": outputs,
    }


def run_bench(out_dir: str, max_exp: int = 6, queries: int = 20, seed: int = 0,
              log=lambda s: None) -> list[dict]:
    """Measure every family at N = 10**2 .. 10**max_exp; write TSV and figures."""
    rng = random.Random(seed)
    rows = []
    sizes = [10 ** e for e in range(2, max_exp + 1)]
    for n in sizes:
        for family, gen, word in (("fibonacci", fibonacci_slp, fibonacci_word),
                                  ("thue-morse", thue_morse_slp, thue_morse_word)):
            rows.append(_measure(family, gen(n), queries, rng, word))
            log(f"{family} n={n} done")
    for n in sizes[:3]:
        text = random_text(rng, n, 2)
        g, _ = recompress_text(text)
        rows.append(_measure("random-2", g, queries, rng, lambda _n, t=text: t))
        log(f"random-2 n={n} done")
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "bench.tsv"), "w", newline="") as f:
        w = csv.DictWriter(f, FIELDS, delimiter="\t", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    _plot(rows, out_dir)
    return rows


def _plot(rows: list[dict], out_dir: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    families = sorted({r["family"] for r in rows})
    fig, ax = plt.subplots(figsize=(5, 4))
    for fam in families:
        rs = [r for r in rows if r["family"] == fam]
        ax.plot([math.log2(r["n"]) for r in rs], [r["height"] for r in rs], "o-", label=fam)
    xs = [math.log2(r["n"]) for r in rows]
    lo, hi = min(xs), max(xs)
    ax.plot([lo, hi], [height_bound(2 ** lo), height_bound(2 ** hi)], "k--", label="bound")
    ax.set_xlabel("log2 N")
    ax.set_ylabel("RLSLP height")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "height.png"), dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 4))
    for fam in families:
        rs = [r for r in rows if r["family"] == fam]
        ax.plot([r["g_rlslp"] for r in rs], [r["base_points"] / r["point_bound"] for r in rs],
                "o-", label=f"{fam} base")
        ax.plot([r["g_rlslp"] for r in rs], [r["frontier_points"] / r["point_bound"] for r in rs],
                "x:", label=f"{fam} frontier")
    ax.set_xscale("log")
    ax.set_xlabel("g' (RLSLP size)")
    ax.set_ylabel("points / g'(log2 g'+1)^2")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "points.png"), dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 4))
    for fam in families:
        rs = [r for r in rows if r["family"] == fam]
        ax.plot([r["n"] for r in rs], [1000 * r["query_s"] / max(1, r["queries"]) for r in rs],
                "o-", label=fam)
    ax.set_xscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("ms per query (first use included)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "query_time.png"), dpi=120)
    plt.close(fig)
