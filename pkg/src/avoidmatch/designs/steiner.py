"""Auxiliary hypergraphs for high-girth Steiner systems.

``G`` has one vertex per r-subset of the point set and one edge per q-subset
(block), the edge being the block's r-shadow.  A matching of ``G`` is a
partial Steiner system.  ``H`` holds every set of ``i`` blocks, ``3 <= i <= g``,
spanning at most ``i(q-r)+r`` points that contains no smaller such set; pairs
of blocks spanning ``<= 2q-r`` points share an r-set and are already excluded
by the matching condition.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from ..combinatorics import all_subsets, rank, rank_array
from ..hypercore import ConfigHypergraph, Hypergraph

__all__ = [
    "ConfigGuardError",
    "SteinerHost",
    "PartiteHost",
    "minimal_configurations",
    "estimate_configurations",
    "build_steiner_aux",
    "build_partite_aux",
    "ExplicitOracle",
    "SteinerOracle",
    "ConfigFreeIndex",
    "greedy_complete",
]

log = logging.getLogger(__name__)

DEFAULT_CONFIG_CAP = 10**8


class ConfigGuardError(RuntimeError):
    """Raised when configuration enumeration would exceed its size guard."""


def _check_params(q: int, r: int, g: int) -> None:
    if not q > r >= 2:
        raise ValueError("need q > r >= 2")
    if g < 2:
        raise ValueError("need g >= 2")


def _max_span(i: int, q: int, r: int) -> int:
    return i * (q - r) + r


def minimal_configurations(blocks: Sequence[Sequence[int]], q: int, r: int, g: int) -> list[tuple[int, ...]]:
    """Minimal ``(i(q-r)+r, i)``-configurations, ``3 <= i <= g``, among ``blocks``.

    Returns sorted tuples of indices into ``blocks``.  Blocks sharing ``r`` or
    more points never appear together.  Minimal configurations are connected,
    so the search grows connected families from their smallest block.  A new
    block may add at most ``budget = g(q-r)+r - |span|`` points; when that
    forces it to meet the span in ``>= r`` points it is looked up through the
    r-subset index instead of the point index.
    """
    _check_params(q, r, g)
    blocks = [tuple(sorted(int(x) for x in b)) for b in blocks]
    bound = _max_span(g, q, r)
    by_point: dict[int, list[int]] = defaultdict(list)
    by_rset: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for idx, b in enumerate(blocks):
        for p in b:
            by_point[p].append(idx)
        for rs in combinations(b, r):
            by_rset[rs].append(idx)
    block_sets = [frozenset(b) for b in blocks]
    by_block: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for idx, b in enumerate(blocks):
        by_block[b].append(idx)

    def is_config(members) -> bool:
        span = frozenset().union(*(block_sets[m] for m in members))
        return len(span) <= _max_span(len(members), q, r)

    found: set[tuple[int, ...]] = set()

    for start in range(len(blocks)):
        seen: set[frozenset] = set()
        stack = [((start,), block_sets[start])]
        while stack:
            chosen, span = stack.pop()
            key = frozenset(chosen)
            if key in seen:
                continue
            seen.add(key)
            k = len(chosen)
            if k >= 3 and len(span) <= _max_span(k, q, r):
                if not any(is_config(sub) for size in range(3, k) for sub in combinations(chosen, size)):
                    found.add(tuple(sorted(chosen)))
                continue
            if k == g:
                continue
            budget = bound - len(span)
            need = q - budget
            cands: set[int] = set()
            if budget == 0:
                for qs in combinations(sorted(span), q):
                    cands.update(by_block.get(qs, ()))
            elif need >= r:
                for rs in combinations(sorted(span), r):
                    cands.update(by_rset.get(rs, ()))
            else:
                for p in span:
                    cands.update(by_point[p])
            for c in sorted(cands):
                if c <= start or c in key:
                    continue
                bc = block_sets[c]
                if len(bc - span) > budget:
                    continue
                if any(len(bc & block_sets[x]) >= r for x in chosen):
                    continue
                stack.append((chosen + (c,), span | bc))
    return sorted(found)


def estimate_configurations(n: int, q: int, r: int, g: int) -> float:
    """Crude upper estimate of the number of configurations of ``K_n^(q)``."""
    total = 0.0
    for i in range(3, g + 1):
        j = min(_max_span(i, q, r), n)
        total += comb(n, j) * comb(comb(j, q), i)
    return total


class SteinerHost:
    """Blocks of ``K_n^(q)`` indexed by colex rank, and the auxiliary ``G``."""

    def __init__(self, n: int, q: int, r: int):
        if not n >= q > r >= 2:
            raise ValueError("need n >= q > r >= 2")
        self.n, self.q, self.r = n, q, r
        self.blocks = all_subsets(n, q)
        shadows = [self.blocks[:, list(pos)] for pos in combinations(range(q), r)]
        vertex_ids = np.stack([rank_array(s, n) for s in shadows], axis=1)
        self.G = Hypergraph(comb(n, r), vertex_ids, validate=False)

    @property
    def degree(self) -> int:
        return comb(self.n - self.r, self.q - self.r)

    def block(self, edge_id: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.blocks[edge_id])

    def edge_id(self, block: Sequence[int]) -> int:
        return rank(block)

    def rset(self, vertex_id: int) -> tuple[int, ...]:
        from ..combinatorics import unrank
        return unrank(vertex_id, self.r)


class SteinerOracle:
    """Configuration detector for the Steiner auxiliary hypergraph.

    ``configs_within(ids)`` returns the configurations of ``H`` whose G-edges
    all lie in ``ids``, without ever materializing ``H`` over all blocks.
    """

    def __init__(self, host: "SteinerHost | PartiteHost", g: int):
        self.host = host
        self.g = g
        _check_params(host.q, host.r, g)

    def configs_within(self, edge_ids) -> list[tuple[int, ...]]:
        ids = np.asarray(edge_ids, dtype=np.int64)
        blocks = self.host.blocks[ids]
        local = minimal_configurations(blocks.tolist(), self.host.q, self.host.r, self.g)
        return [tuple(sorted(int(ids[j]) for j in c)) for c in local]

    def restricted(self, edge_ids) -> ConfigHypergraph:
        """Configurations inside ``edge_ids``, relabelled to positions in ``edge_ids``."""
        ids = np.asarray(edge_ids, dtype=np.int64)
        blocks = self.host.blocks[ids]
        local = minimal_configurations(blocks.tolist(), self.host.q, self.host.r, self.g)
        return ConfigHypergraph(len(ids), local, validate=False)


class ExplicitOracle:
    """Configuration detector backed by an explicit :class:`ConfigHypergraph`."""

    def __init__(self, H: ConfigHypergraph):
        self.H = H

    def configs_within(self, edge_ids) -> list[tuple[int, ...]]:
        return list(self.H.restrict(np.asarray(edge_ids, dtype=np.int64), new_ids=np.asarray(edge_ids)).configs)

    def restricted(self, edge_ids) -> ConfigHypergraph:
        return self.H.restrict(np.asarray(edge_ids, dtype=np.int64))


def build_steiner_aux(n: int, q: int, r: int, g: int, *, max_configs: float = DEFAULT_CONFIG_CAP,
                      host: SteinerHost | None = None) -> tuple[Hypergraph, ConfigHypergraph]:
    """``(G, H)`` for ``(n, q, r)``-Steiner systems without small configurations.

    Edge ``k`` of ``G`` is the block of colex rank ``k``; vertex ``v`` of ``G``
    is the r-set of rank ``v``.
    """
    _check_params(q, r, g)
    if n < q:
        raise ValueError("need n >= q")
    est = estimate_configurations(n, q, r, g)
    if est > max_configs:
        raise ConfigGuardError(
            f"estimated {est:.3g} configurations exceeds the cap {max_configs:.3g}; use the sparsified route"
        )
    host = host or SteinerHost(n, q, r)
    configs = minimal_configurations(host.blocks.tolist(), q, r, g) if g >= 3 else []
    H = ConfigHypergraph(host.G.num_edges, configs, validate=False)
    return host.G, H


class PartiteHost:
    """Transversal blocks of the q-partite point grid ``[q] x [n]``.

    Point ``(part, x)`` has id ``part * n + x``; G-vertices are the partite
    r-subsets (at most one point per part) that occur in some block.
    """

    def __init__(self, n: int, q: int, r: int):
        if not (n >= 1 and q > r >= 2):
            raise ValueError("need n >= 1 and q > r >= 2")
        self.n, self.q, self.r = n, q, r
        grids = np.stack(np.meshgrid(*[np.arange(n)] * q, indexing="ij"), axis=-1).reshape(-1, q)
        self.blocks = grids + np.arange(q) * n
        rsets = sorted(
            tuple(p * n + x for p, x in zip(parts, xs))
            for parts in combinations(range(q), r)
            for xs in np.ndindex(*([n] * r))
        )
        self.vertex_id = {rs: i for i, rs in enumerate(rsets)}
        edges = [[self.vertex_id[rs] for rs in combinations(tuple(int(x) for x in b), r)] for b in self.blocks]
        self.G = Hypergraph(len(rsets), edges, validate=False)


def build_partite_aux(n: int, q: int, r: int, g: int, *, max_configs: float = DEFAULT_CONFIG_CAP
                      ) -> tuple[Hypergraph, ConfigHypergraph]:
    """Partite analogue of :func:`build_steiner_aux` on ``K_{q*n}^r``."""
    _check_params(q, r, g)
    host = PartiteHost(n, q, r)
    est = estimate_configurations(q * n, q, r, g)
    if est > max_configs:
        raise ConfigGuardError(f"estimated {est:.3g} configurations exceeds the cap {max_configs:.3g}")
    configs = minimal_configurations(host.blocks.tolist(), q, r, g) if g >= 3 else []
    return host.G, ConfigHypergraph(host.G.num_edges, configs, validate=False)


class ConfigFreeIndex:
    """Blocks accepted so far, with a test for whether one more block would create a configuration.

    The accepted family never contains ``i`` blocks spanning at most
    ``i(q-r)+r`` points for ``2 <= i <= g``.  A new block can only create
    such a family together with old blocks; the smallest one is connected and
    contains the new block, so it is found by connected growth from it.
    """

    def __init__(self, q: int, r: int, g: int):
        _check_params(q, r, g)
        self.q, self.r, self.g = q, r, g
        self.blocks: list[frozenset[int]] = []
        self.by_point: dict[int, list[int]] = defaultdict(list)
        self.by_rset: dict[tuple[int, ...], int] = {}
        self.by_block: dict[tuple[int, ...], int] = {}

    def __len__(self) -> int:
        return len(self.blocks)

    def shares_rset(self, block: Sequence[int]) -> bool:
        return any(rs in self.by_rset for rs in combinations(sorted(block), self.r))

    def creates_configuration(self, block: Sequence[int]) -> bool:
        b = tuple(sorted(int(x) for x in block))
        if self.shares_rset(b):
            return True
        q, r, g = self.q, self.r, self.g
        bound = _max_span(g, q, r)
        stack = [((-1,), frozenset(b))]
        seen: set[frozenset] = set()
        while stack:
            chosen, span = stack.pop()
            k = len(chosen)
            if k >= 3 and len(span) <= _max_span(k, q, r):
                return True
            if k == g:
                continue
            budget = bound - len(span)
            need = q - budget
            cands: set[int] = set()
            if budget == 0:
                for qs in combinations(sorted(span), q):
                    if qs in self.by_block:
                        cands.add(self.by_block[qs])
            elif need >= r:
                for rs in combinations(sorted(span), r):
                    if rs in self.by_rset:
                        cands.add(self.by_rset[rs])
            else:
                for p in span:
                    cands.update(self.by_point.get(p, ()))
            for c in cands:
                if c in chosen:
                    continue
                bc = self.blocks[c]
                if len(bc - span) > budget:
                    continue
                key = frozenset(chosen[1:] + (c,))
                if key in seen:
                    continue
                seen.add(key)
                stack.append((chosen + (c,), span | bc))
        return False

    def add(self, block: Sequence[int]) -> None:
        b = tuple(sorted(int(x) for x in block))
        idx = len(self.blocks)
        self.blocks.append(frozenset(b))
        self.by_block[b] = idx
        for p in b:
            self.by_point[p].append(idx)
        for rs in combinations(b, self.r):
            self.by_rset[rs] = idx


def greedy_complete(blocks: Sequence[Sequence[int]], candidates: np.ndarray, q: int, r: int, g: int,
                    order: np.ndarray) -> list[int]:
    """Extend a configuration-free family by scanning ``candidates[order]`` once.

    ``blocks`` must already be configuration-free.  Returns the candidate rows
    that were accepted, in acceptance order.
    """
    index = ConfigFreeIndex(q, r, g)
    for b in blocks:
        index.add(b)
    accepted = []
    for row in order:
        cand = tuple(int(x) for x in candidates[row])
        if index.creates_configuration(cand):
            continue
        index.add(cand)
        accepted.append(int(row))
    return accepted
