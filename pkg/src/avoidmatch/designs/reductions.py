"""Auxiliary-hypergraph reductions: rainbow, disjoint-matching and list-coloring lifts,
B-side regularization and random weighted decrease.

Each lift comes with ``encode``/``decode`` helpers translating between
solutions of the lifted problem and solutions of the original one.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..hypercore import ConfigHypergraph, Hypergraph
from ..rng import uniforms
from .instance import EdgeColoring, ListAssignment

__all__ = [
    "RegularizeGuardError",
    "build_rainbow",
    "decode_rainbow",
    "lift_disjoint",
    "encode_disjoint",
    "decode_disjoint",
    "lift_list",
    "encode_list",
    "decode_list",
    "regularize",
    "random_decrease",
]


class RegularizeGuardError(RuntimeError):
    pass


def build_rainbow(G: Hypergraph, coloring: EdgeColoring) -> Hypergraph:
    """Extend every edge by a vertex for its color.

    Vertices ``0 .. v(G)-1`` keep their ids and form ``B``; color ``c`` becomes
    vertex ``v(G) + c`` in ``A``.  Edge ids are unchanged, so a matching of the
    result is literally a rainbow matching of ``(G, coloring)``.
    """
    if len(coloring.colors) != G.num_edges:
        raise ValueError("coloring must assign a color to every edge")
    nv = G.num_vertices
    edges = [G.edge(i) + (nv + coloring.colors[i],) for i in range(G.num_edges)]
    a_side = range(nv, nv + coloring.num_colors)
    return Hypergraph(nv + coloring.num_colors, edges, (a_side, range(nv)))


def decode_rainbow(matching: Iterable[int]) -> frozenset[int]:
    return frozenset(int(x) for x in matching)


def _require_bipartite(G: Hypergraph) -> None:
    if not G.is_bipartite:
        raise ValueError("hypergraph must be bipartite")


def lift_disjoint(G: Hypergraph, H: ConfigHypergraph, m: int) -> tuple[Hypergraph, ConfigHypergraph]:
    """Lift whose A'-perfect H'-avoiding matchings are ``m`` disjoint A-perfect ones.

    Vertex ``(v, i)`` gets id ``i * v(G) + v``; the vertex standing for G-edge
    ``e`` gets id ``m * v(G) + e``.  Lifted edge ``e_i`` has id ``i * e(G) + e``.
    """
    _require_bipartite(G)
    if m < 1:
        raise ValueError("m must be at least 1")
    nv, ne = G.num_vertices, G.num_edges
    edges = []
    for i in range(m):
        for e in range(ne):
            edges.append([i * nv + v for v in G.edge(e)] + [m * nv + e])
    a, b = G.bipartition
    a_side = [i * nv + v for i in range(m) for v in a]
    b_side = [i * nv + v for i in range(m) for v in b] + [m * nv + e for e in range(ne)]
    lifted = Hypergraph(m * nv + ne, edges, (a_side, b_side))
    configs = [[i * ne + e for e in S] for i in range(m) for S in H.configs]
    return lifted, ConfigHypergraph(m * ne, configs, validate=False)


def encode_disjoint(G: Hypergraph, matchings: Sequence[Iterable[int]]) -> frozenset[int]:
    ne = G.num_edges
    return frozenset(i * ne + int(e) for i, M in enumerate(matchings) for e in M)


def decode_disjoint(G: Hypergraph, m: int, lifted_matching: Iterable[int]) -> list[frozenset[int]]:
    ne = G.num_edges
    out: list[set[int]] = [set() for _ in range(m)]
    for x in lifted_matching:
        i, e = divmod(int(x), ne)
        out[i].add(e)
    return [frozenset(s) for s in out]


def lift_list(G: Hypergraph, H: ConfigHypergraph, lists: ListAssignment
              ) -> tuple[Hypergraph, ConfigHypergraph, list[tuple[int, int]]]:
    """Lift whose A_L-perfect H_L-avoiding matchings are L-colorings with H-avoiding classes.

    ``A_L`` is ``E(G)`` (vertex id ``e``); ``(v, c)`` has id
    ``e(G) + idx(c) * v(G) + v`` where ``idx`` ranks the palette.  Returns the
    lifted pair plus ``labels[k] = (e, c)`` for lifted edge ``k``.
    """
    if len(lists.lists) != G.num_edges:
        raise ValueError("list assignment must cover every edge")
    nv, ne = G.num_vertices, G.num_edges
    palette = lists.palette
    idx = {c: k for k, c in enumerate(palette)}
    edges, labels = [], []
    lookup: dict[tuple[int, int], int] = {}
    for e in range(ne):
        for c in lists.lists[e]:
            lookup[(e, c)] = len(labels)
            labels.append((e, c))
            edges.append([e] + [ne + idx[c] * nv + v for v in G.edge(e)])
    total = ne + len(palette) * nv
    lifted = Hypergraph(total, edges, (range(ne), range(ne, total)))
    configs = []
    for S in H.configs:
        common = set(lists.lists[S[0]]).intersection(*(lists.lists[e] for e in S[1:]))
        for c in sorted(common):
            configs.append([lookup[(e, c)] for e in S])
    return lifted, ConfigHypergraph(len(labels), configs, validate=False), labels


def encode_list(labels: Sequence[tuple[int, int]], coloring: Mapping[int, int]) -> frozenset[int]:
    where = {lab: k for k, lab in enumerate(labels)}
    return frozenset(where[(int(e), int(c))] for e, c in coloring.items())


def decode_list(labels: Sequence[tuple[int, int]], lifted_matching: Iterable[int]) -> dict[int, int]:
    coloring: dict[int, int] = {}
    for k in lifted_matching:
        e, c = labels[int(k)]
        if e in coloring:
            raise ValueError(f"edge {e} colored twice; input is not a matching")
        coloring[e] = c
    return coloring


def regularize(G: Hypergraph, D_A: int, D_B: int, *, max_edges: int = 10**7) -> Hypergraph:
    """Embed ``G`` in a bipartite r-uniform hypergraph with all A-degrees ``D_A`` and B-degrees ``D_B``.

    One step takes ``K = D_A (r-1)`` disjoint copies of ``G`` and, for each
    minimum-degree B-vertex ``x_t``, a new A-vertex ``a_t`` with ``D_A`` edges
    ``{a_t} + {(x_t, k(r-1)+j) : j < r-1}``, raising the minimum B-degree by one.
    Copy 0 keeps the original ids at every step, so the input sits inside the
    output as an induced subhypergraph under the identity map.
    """
    _require_bipartite(G)
    r = G.uniformity
    if G.num_edges and (r is None or r < 2):
        raise ValueError("regularize needs an r-uniform hypergraph with r >= 2")
    deg = G.degrees()
    a_mask = G.in_a
    if G.num_edges == 0:
        raise ValueError("regularize needs at least one edge")
    if (deg[a_mask] != D_A).any():
        raise ValueError("every A-vertex must have degree exactly D_A")
    if (deg[~a_mask] > D_B).any():
        raise ValueError("every B-vertex must have degree at most D_B")

    K = D_A * (r - 1)
    steps = int(D_B - deg[~a_mask].min()) if (~a_mask).any() else 0
    projected = G.num_edges * float(K) ** steps
    if projected > max_edges:
        raise RegularizeGuardError(f"regularization would produce about {projected:.3g} edges")

    nv = G.num_vertices
    edges = [list(e) for e in G.edges]
    a_side = list(G.bipartition[0])
    b_side = list(G.bipartition[1])
    for _ in range(steps):
        deg = np.bincount([v for e in edges for v in e], minlength=nv)
        b_deg = deg[b_side]
        low = int(b_deg.min())
        xs = [v for v in b_side if deg[v] == low]
        new_edges = [[i * nv + v for v in e] for i in range(K) for e in edges]
        new_a = [i * nv + v for i in range(K) for v in a_side]
        new_b = [i * nv + v for i in range(K) for v in b_side]
        base = K * nv
        for t, x in enumerate(xs):
            for k in range(D_A):
                new_edges.append([base + t] + [(k * (r - 1) + j) * nv + x for j in range(r - 1)])
            new_a.append(base + t)
        nv = base + len(xs)
        edges, a_side, b_side = new_edges, new_a, new_b
    return Hypergraph(nv, edges, (a_side, b_side))


def random_decrease(G: Hypergraph, weights, seed: int) -> Hypergraph:
    """Keep each edge ``e`` independently with probability ``weights[e]``."""
    w = np.asarray([weights[e] for e in range(G.num_edges)] if isinstance(weights, Mapping) else weights,
                   dtype=np.float64)
    if w.shape != (G.num_edges,):
        raise ValueError("need one weight per edge")
    if ((w < 0) | (w > 1)).any():
        raise ValueError("weights must lie in [0, 1]")
    u = uniforms(seed, 0, "random-decrease", G.num_edges)
    return G.edge_subgraph(np.flatnonzero(u < w))
