"""Independent DTW oracle: exhaustive enumeration of monotone warping paths.

Deliberately shares no code with the production matcher. Costs are computed
straight from the weighted-distance formula, and the minimum is taken over
every explicitly enumerated path, not via dynamic programming.
"""

from __future__ import annotations

import math


def enumerate_monotone_paths(m: int, n: int) -> list[list[tuple[int, int]]]:
    """All paths from (0,0) to (m-1,n-1) using steps (1,0), (0,1), (1,1)."""
    paths: list[list[tuple[int, int]]] = []
    acc: list[tuple[int, int]] = [(0, 0)]

    def walk(i: int, j: int) -> None:
        if i == m - 1 and j == n - 1:
            paths.append(acc.copy())
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            ni, nj = i + di, j + dj
            if ni < m and nj < n:
                acc.append((ni, nj))
                walk(ni, nj)
                acc.pop()

    walk(0, 0)
    return paths


def frame_cost(a, b) -> float:
    """Weighted frame distance written out from the formula, per keypoint triples."""
    num = 0.0
    den = 0.0
    for (ax, ay, ac), (bx, by, bc) in zip(a, b):
        w = min(ac, bc)
        if w > 0.0:
            num += w * ((ax - bx) ** 2 + (ay - by) ** 2)
            den += w
    if den == 0.0:
        return 0.0
    return math.sqrt(num / den)


def oracle_distance(frames_a, frames_b, band: int | None = None) -> float:
    """Minimum total cost over all enumerated monotone paths.

    `frames_*` are lists of frames; each frame is a list of (x, y, conf)
    triples. With a band, paths touching |i - j| > band are discarded.
    """
    best = math.inf
    for path in enumerate_monotone_paths(len(frames_a), len(frames_b)):
        if band is not None and any(abs(i - j) > band for i, j in path):
            continue
        total = sum(frame_cost(frames_a[i], frames_b[j]) for i, j in path)
        if total < best:
            best = total
    return best
