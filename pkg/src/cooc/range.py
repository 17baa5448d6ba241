"""Two-sided range emptiness over 2D points via a Pareto frontier."""

from __future__ import annotations

from bisect import bisect_left
from typing import Iterable


class Staircase:
    """Pareto-maximal points, x strictly increasing and y strictly decreasing."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs: list[int], ys: list[int]):
        self.xs = xs
        self.ys = ys

    @property
    def frontier(self) -> list[tuple[int, int]]:
        return list(zip(self.xs, self.ys))

    def __len__(self) -> int:
        return len(self.xs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Staircase) and self.xs == other.xs and self.ys == other.ys

    def __repr__(self) -> str:
        return f"Staircase({self.frontier})"


def build_staircase(points: Iterable[tuple[int, int]]) -> Staircase:
    xs: list[int] = []
    ys: list[int] = []
    best_y = None
    # sweep by decreasing x (ties: larger y first) keeping points above the running max
    for x, y in sorted(set(points), key=lambda t: (-t[0], -t[1])):
        if best_y is None or y > best_y:
            xs.append(x)
            ys.append(y)
            best_y = y
    xs.reverse()
    ys.reverse()
    return Staircase(xs, ys)


def dominant_exists(s: Staircase, alpha, beta) -> bool:
    """Is there a point with x >= alpha and y >= beta?"""
    i = bisect_left(s.xs, alpha)
    return i < len(s.xs) and s.ys[i] >= beta


def merge_staircases(parts: Iterable[Staircase], extra: Iterable[tuple[int, int]] = ()) -> Staircase:
    pts = list(extra)
    for p in parts:
        pts.extend(zip(p.xs, p.ys))
    return build_staircase(pts)
