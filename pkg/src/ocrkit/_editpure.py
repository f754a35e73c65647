"""Pure-Python twin of the compiled sequence kernels.

Same contracts and tie-breaking as ocrkit._editcore so the two backends are
interchangeable.
"""

from __future__ import annotations

from typing import Sequence


def edit_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """Minimum number of single-element insertions, deletions and
    substitutions turning ``a`` into ``b``."""
    n = len(a)
    m = len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    prev = list(range(m + 1))
    curr = [0] * (m + 1)
    for i in range(1, n + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1]
            if ai != b[j - 1]:
                best += 1
            cand = prev[j] + 1
            if cand < best:
                best = cand
            cand = curr[j - 1] + 1
            if cand < best:
                best = cand
            curr[j] = best
        prev, curr = curr, prev
    return prev[m]


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    n = len(a)
    m = len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            elif prev[j] >= curr[j - 1]:
                curr[j] = prev[j]
            else:
                curr[j] = curr[j - 1]
        prev, curr = curr, prev
        curr[0] = 0
    return prev[m]


def lcs_hit_positions(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Positions in ``a`` covered by one longest common subsequence of
    ``a`` and ``b``, ascending.

    Tie rule matches the compiled kernel: when up and left cells are equal
    the backtrack steps along ``a``.
    """
    n = len(a)
    m = len(b)
    if n == 0 or m == 0:
        return []
    width = m + 1
    table = [0] * ((n + 1) * width)
    for i in range(1, n + 1):
        ai = a[i - 1]
        row = i * width
        above = row - width
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                table[row + j] = table[above + j - 1] + 1
            elif table[above + j] >= table[row + j - 1]:
                table[row + j] = table[above + j]
            else:
                table[row + j] = table[row + j - 1]
    hits: list[int] = []
    i = n
    j = m
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1]:
            hits.append(i - 1)
            i -= 1
            j -= 1
        elif table[i * width + j - 1] > table[(i - 1) * width + j]:
            j -= 1
        else:
            i -= 1
    hits.reverse()
    return hits
