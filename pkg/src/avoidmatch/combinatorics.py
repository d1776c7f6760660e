"""Ranking of k-subsets in the combinatorial number system (colex order).

A sorted subset ``c_1 < c_2 < ... < c_k`` of ``{0, ..., n-1}`` has rank
``sum_j C(c_j, j)``; ranks are dense in ``[0, C(n, k))`` and do not depend on
``n``, which is what lets r-sets and q-sets double as vertex and edge ids.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

__all__ = ["rank", "unrank", "rank_array", "all_subsets", "binom_table"]


def rank(subset: Iterable[int]) -> int:
    return sum(comb(c, j) for j, c in enumerate(sorted(subset), start=1))


def unrank(index: int, k: int) -> tuple[int, ...]:
    out = []
    for j in range(k, 0, -1):
        # largest c with C(c, j) <= index
        c = j - 1
        while comb(c + 1, j) <= index:
            c += 1
        out.append(c)
        index -= comb(c, j)
    return tuple(reversed(out))


def binom_table(n: int, k: int) -> np.ndarray:
    """``table[c, j] = C(c, j)`` for ``0 <= c <= n``, ``0 <= j <= k``."""
    table = np.zeros((n + 1, k + 1), dtype=np.int64)
    for c in range(n + 1):
        for j in range(k + 1):
            table[c, j] = comb(c, j)
    return table


def rank_array(subsets: np.ndarray, n: int) -> np.ndarray:
    """Vectorized :func:`rank` for an ``(m, k)`` array of sorted rows."""
    subsets = np.asarray(subsets, dtype=np.int64)
    if subsets.ndim != 2:
        raise ValueError("expected a 2-d array of sorted subsets")
    k = subsets.shape[1]
    table = binom_table(n, k)
    out = np.zeros(subsets.shape[0], dtype=np.int64)
    for j in range(k):
        out += table[subsets[:, j], j + 1]
    return out


def all_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of ``range(n)`` as sorted rows, row ``i`` having rank ``i``."""
    total = comb(n, k)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int32)
    flat = np.fromiter(
        (x for c in combinations(range(n), k) for x in c), dtype=np.int32, count=total * k
    )
    lex = flat.reshape(total, k)
    out = np.empty_like(lex)
    out[rank_array(lex, n)] = lex
    return out
