"""Hypergraphs, configuration hypergraphs and the degree/girth metrics on them.

A :class:`Hypergraph` ``G`` stores its edges in CSR form (``indptr`` /
``indices``); the id of an edge is its position, so duplicated edges of a
multi-hypergraph keep distinct ids.  A :class:`ConfigHypergraph` ``H`` lives on
``E(G)``: each configuration is a set of G-edge ids that must not all appear
in a matching.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Hypergraph",
    "ConfigHypergraph",
    "CycleWitness",
    "CYCLE_KINDS",
    "degree",
    "i_degree",
    "pair_codegree",
    "cross_i_codegree",
    "max_codegree_with",
    "kl_codegree_max",
    "weighted_degree",
    "max_weighted_degree",
    "girth",
    "find_short_cycles",
    "is_matching",
    "is_h_avoiding",
    "canonical_form",
]

CYCLE_KINDS = ("two_cycle_good", "two_cycle_bad", "loose_triangle", "loose_four_cycle", "generic_i_cycle")


def _csr(rows: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.fromiter((len(r) for r in rows), dtype=np.int64, count=len(rows))
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


def _transpose(indptr: np.ndarray, indices: np.ndarray, num_cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Column-to-row CSR of a 0/1 incidence matrix given as row CSR."""
    rows = np.repeat(np.arange(len(indptr) - 1, dtype=np.int64), np.diff(indptr))
    order = np.argsort(indices, kind="stable")
    counts = np.bincount(indices, minlength=num_cols)
    t_indptr = np.zeros(num_cols + 1, dtype=np.int64)
    np.cumsum(counts, out=t_indptr[1:])
    return t_indptr, rows[order]


class Hypergraph:
    """A multi-hypergraph on vertices ``0 .. num_vertices-1``.

    Parameters
    ----------
    num_vertices : int
    edges : sequence of vertex-id sequences, or an ``(m, k)`` integer array
        Each edge is stored sorted; a repeated vertex inside one edge is an error.
    bipartition : optional ``(A, B)``
        When given, ``A`` and ``B`` must partition the vertex set and every edge
        must contain exactly one vertex of ``A``.
    """

    def __init__(self, num_vertices: int, edges=(), bipartition=None, *, validate: bool = True):
        self.num_vertices = int(num_vertices)
        if isinstance(edges, np.ndarray) and edges.ndim == 2:
            arr = np.sort(np.asarray(edges, dtype=np.int64), axis=1)
            m, k = arr.shape
            self.indptr = np.arange(0, m * k + 1, k, dtype=np.int64) if m else np.zeros(1, dtype=np.int64)
            self.indices = arr.reshape(-1)
        else:
            self.indptr, self.indices = _csr([sorted(int(v) for v in e) for e in edges])
        self.indices = self.indices.astype(np.int64, copy=False)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._incidence = None
        if bipartition is not None:
            a, b = bipartition
            bipartition = (tuple(sorted(int(x) for x in a)), tuple(sorted(int(x) for x in b)))
        self.bipartition = bipartition
        if validate:
            self._validate()

    def _validate(self) -> None:
        if self.num_vertices < 0:
            raise ValueError("num_vertices must be nonnegative")
        if len(self.indices):
            if self.indices.min() < 0 or self.indices.max() >= self.num_vertices:
                raise ValueError("edge references a vertex id outside [0, num_vertices)")
            sizes = np.diff(self.indptr)
            if (sizes == 0).any():
                raise ValueError("empty edge")
            step = np.diff(self.indices)
            inside = np.ones(len(step), dtype=bool)
            inside[self.indptr[1:-1] - 1] = False
            if (step[inside] <= 0).any():
                raise ValueError("edge contains a repeated vertex")
        if self.bipartition is not None:
            a, b = self.bipartition
            sa, sb = set(a), set(b)
            if sa & sb or len(sa) + len(sb) != self.num_vertices or not all(0 <= x < self.num_vertices for x in sa | sb):
                raise ValueError("bipartition must partition the vertex set")
            hits = self.in_a[self.indices]
            per_edge = np.add.reduceat(hits.astype(np.int64), self.indptr[:-1]) if self.num_edges else np.zeros(0)
            if (per_edge != 1).any():
                bad = int(np.flatnonzero(per_edge != 1)[0])
                raise ValueError(f"edge {bad} does not contain exactly one vertex of A")

    # -- basic access -------------------------------------------------
    @property
    def num_edges(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def rank(self) -> int:
        """Maximum edge size (0 for an edgeless hypergraph)."""
        return int(self.edge_sizes.max()) if self.num_edges else 0

    @property
    def uniformity(self) -> int | None:
        sizes = self.edge_sizes
        if not len(sizes):
            return None
        return int(sizes[0]) if (sizes == sizes[0]).all() else None

    def edge(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.num_edges:
            raise IndexError(f"edge id {i} out of range")
        return tuple(int(x) for x in self.indices[self.indptr[i] : self.indptr[i + 1]])

    @property
    def edges(self) -> list[tuple[int, ...]]:
        return [self.edge(i) for i in range(self.num_edges)]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, k)`` array; only for uniform hypergraphs."""
        k = self.uniformity
        if k is None:
            if self.num_edges == 0:
                return np.zeros((0, 0), dtype=np.int64)
            raise ValueError("hypergraph is not uniform")
        return self.indices.reshape(self.num_edges, k)

    @property
    def is_bipartite(self) -> bool:
        return self.bipartition is not None

    @property
    def in_a(self) -> np.ndarray:
        cached = self.__dict__.get("_in_a")
        if cached is not None and cached[0] is self.bipartition:
            return cached[1]
        mask = np.zeros(self.num_vertices, dtype=bool)
        if self.bipartition is not None:
            mask[list(self.bipartition[0])] = True
        mask.setflags(write=False)
        self._in_a = (self.bipartition, mask)
        return mask

    def with_bipartition(self, a: Iterable[int], b: Iterable[int]) -> "Hypergraph":
        """Same edges under a new bipartition (validated)."""
        out = self.edge_subgraph(np.arange(self.num_edges))
        out.bipartition = (tuple(sorted(int(x) for x in a)), tuple(sorted(int(x) for x in b)))
        out._validate()
        return out

    def a_vertex_of_edges(self) -> np.ndarray:
        """The unique A-vertex of each edge (bipartite hypergraphs only)."""
        if self.bipartition is None:
            raise ValueError("hypergraph has no bipartition")
        hits = self.in_a[self.indices]
        return self.indices[hits]

    @property
    def incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """Vertex-to-edge CSR: edges at ``v`` are ``ind[ptr[v]:ptr[v+1]]``."""
        if self._incidence is None:
            self._incidence = _transpose(self.indptr, self.indices, self.num_vertices)
        return self._incidence

    def edges_at(self, v: int) -> np.ndarray:
        ptr, ind = self.incidence
        return ind[ptr[v] : ptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.num_vertices)

    def edge_subgraph(self, edge_ids: Iterable[int]) -> "Hypergraph":
        """Spanning subhypergraph keeping ``edge_ids`` (renumbered in the given order)."""
        ids = np.asarray(list(edge_ids) if not isinstance(edge_ids, np.ndarray) else edge_ids, dtype=np.int64)
        sizes = self.edge_sizes[ids]
        starts = self.indptr[ids]
        indptr = np.zeros(len(ids) + 1, dtype=np.int64)
        np.cumsum(sizes, out=indptr[1:])
        gather = np.repeat(starts - indptr[:-1], sizes) + np.arange(indptr[-1])
        sub = Hypergraph.__new__(Hypergraph)
        sub.num_vertices = self.num_vertices
        sub.indptr = indptr
        sub.indices = self.indices[gather]
        sub.indptr.setflags(write=False)
        sub.indices.setflags(write=False)
        sub._incidence = None
        sub.bipartition = self.bipartition
        return sub

    # -- serialization ------------------------------------------------
    def to_dict(self) -> dict:
        bip = None
        if self.bipartition is not None:
            bip = {"A": list(self.bipartition[0]), "B": list(self.bipartition[1])}
        return {"num_vertices": self.num_vertices, "edges": [list(e) for e in self.edges], "bipartition": bip}

    @classmethod
    def from_dict(cls, data: dict) -> "Hypergraph":
        bip = data.get("bipartition")
        if bip is not None:
            bip = (bip["A"], bip["B"])
        return cls(data["num_vertices"], data["edges"], bip)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and self.bipartition == other.bipartition
        )

    def __repr__(self) -> str:
        tag = ", bipartite" if self.is_bipartite else ""
        return f"Hypergraph(v={self.num_vertices}, e={self.num_edges}{tag})"


def _normalize(configs: Iterable[Iterable[int]]) -> list[tuple[int, ...]]:
    """Deduplicate, drop configurations of size < 2 and any proper superset of another."""
    uniq = sorted({tuple(sorted(set(int(x) for x in c))) for c in configs}, key=lambda c: (len(c), c))
    kept: list[tuple[int, ...]] = []
    present: set[tuple[int, ...]] = set()
    sizes: set[int] = set()
    for c in uniq:
        if len(c) < 2:
            continue
        if any(sub in present for k in sizes if k < len(c) for sub in combinations(c, k)):
            continue
        kept.append(c)
        present.add(c)
        sizes.add(len(c))
    kept.sort()
    return kept


class ConfigHypergraph:
    """Configuration hypergraph on the edge ids ``0 .. num_ground_edges-1`` of ``G``.

    Configurations are normalized at construction: duplicates, sets of size
    below two and supersets of other configurations are removed, and the
    remaining sets are sorted lexicographically.  With a ``ground`` hypergraph
    each configuration is checked to be a matching of it.
    """

    def __init__(self, num_ground_edges: int, configs=(), ground: Hypergraph | None = None, *,
                 normalize: bool = True, validate: bool = True):
        self.num_ground_edges = int(num_ground_edges)
        if ground is not None and ground.num_edges != self.num_ground_edges:
            raise ValueError("ground hypergraph edge count does not match num_ground_edges")
        self.ground = ground
        if normalize:
            cfgs = _normalize(configs)
        else:
            cfgs = [tuple(c) for c in configs]
        self.configs: tuple[tuple[int, ...], ...] = tuple(cfgs)
        self.indptr, self.indices = _csr(self.configs)
        self._incidence = None
        if validate:
            self._validate()

    def _validate(self) -> None:
        if len(self.indices) and (self.indices.min() < 0 or self.indices.max() >= self.num_ground_edges):
            raise ValueError("configuration references an unknown G-edge id")
        if any(len(c) < 2 for c in self.configs):
            raise ValueError("configuration of size < 2")
        if self.ground is not None:
            for c in self.configs:
                ok, _ = is_matching(self.ground, c)
                if not ok:
                    raise ValueError(f"configuration {c} is not a matching of the ground hypergraph")

    @property
    def num_configs(self) -> int:
        return len(self.configs)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_size(self) -> int:
        return int(self.sizes.max()) if self.num_configs else 0

    @property
    def incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """G-edge to configuration CSR."""
        if self._incidence is None:
            self._incidence = _transpose(self.indptr, self.indices, self.num_ground_edges)
        return self._incidence

    def configs_at(self, e: int) -> np.ndarray:
        ptr, ind = self.incidence
        return ind[ptr[e] : ptr[e + 1]]

    def size_degrees(self) -> np.ndarray:
        """``out[e, i]`` = number of configurations of size ``i`` containing ``e``."""
        width = self.max_size + 1 if self.num_configs else 3
        out = np.zeros((self.num_ground_edges, max(width, 3)), dtype=np.int64)
        if self.num_configs:
            rows = np.repeat(np.arange(self.num_configs), self.sizes)
            np.add.at(out, (self.indices, self.sizes[rows]), 1)
        return out

    def weighted_degrees(self, D: float) -> np.ndarray:
        if D < 1:
            raise ValueError("D must be at least 1")
        out = np.zeros(self.num_ground_edges, dtype=np.float64)
        if self.num_configs:
            s = self.sizes.astype(np.float64)
            per_config = (s - 1) / np.power(float(D), s - 1)
            np.add.at(out, self.indices, np.repeat(per_config, self.sizes))
        return out

    def restrict(self, keep: np.ndarray | Iterable[int], new_ids: np.ndarray | None = None,
                 ground: Hypergraph | None = None) -> "ConfigHypergraph":
        """Configurations lying entirely inside ``keep``, relabelled to ``0..len(keep)-1``."""
        keep = np.asarray(list(keep) if not isinstance(keep, np.ndarray) else keep, dtype=np.int64)
        remap = np.full(self.num_ground_edges, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep)) if new_ids is None else new_ids
        out = []
        if self.num_configs:
            mapped = remap[self.indices]
            alive = np.add.reduceat((mapped >= 0).astype(np.int64), self.indptr[:-1]) == self.sizes
            for j in np.flatnonzero(alive):
                out.append(tuple(sorted(int(x) for x in mapped[self.indptr[j] : self.indptr[j + 1]])))
        return ConfigHypergraph(len(keep), out, ground, validate=False)

    def to_dict(self) -> dict:
        return {"configs": [list(c) for c in self.configs]}

    @classmethod
    def from_dict(cls, data: dict, num_ground_edges: int, ground: Hypergraph | None = None) -> "ConfigHypergraph":
        return cls(num_ground_edges, data["configs"], ground)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfigHypergraph):
            return NotImplemented
        return self.num_ground_edges == other.num_ground_edges and self.configs == other.configs

    def __repr__(self) -> str:
        return f"ConfigHypergraph(ground_edges={self.num_ground_edges}, configs={self.num_configs})"


@dataclass(frozen=True)
class CycleWitness:
    """An i-cycle ``C_1, v_1, ..., C_i, v_i`` of a configuration hypergraph.

    ``config_edge_ids`` are configuration indices; ``link_vertices`` are the
    G-edge ids with ``v_j`` in ``C_j`` and ``C_{j+1 mod i}``.
    """

    kind: str
    config_edge_ids: tuple[int, ...]
    link_vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.config_edge_ids)

    def validate(self, H: ConfigHypergraph) -> None:
        if self.kind not in CYCLE_KINDS:
            raise ValueError(f"unknown cycle kind {self.kind!r}")
        cs, vs = self.config_edge_ids, self.link_vertices
        i = len(cs)
        if i < 2 or len(vs) != i:
            raise ValueError("cycle needs i >= 2 configurations and i link vertices")
        if len(set(cs)) != i or len(set(vs)) != i:
            raise ValueError("cycle configurations and link vertices must be distinct")
        sets = [set(H.configs[c]) for c in cs]
        for j in range(i):
            if vs[j] not in sets[j] or vs[j] not in sets[(j + 1) % i]:
                raise ValueError(f"link vertex {vs[j]} not shared by consecutive configurations")
        if self.kind in ("loose_triangle", "loose_four_cycle"):
            for j in range(i):
                if sets[j] & sets[(j + 1) % i] != {vs[j]}:
                    raise ValueError("loose cycle: consecutive configurations must meet only in the link")
                for k in range(i):
                    if (k - j) % i not in (0, 1, i - 1) and sets[j] & sets[k]:
                        raise ValueError("loose cycle: non-consecutive configurations must be disjoint")
        if self.kind.startswith("two_cycle"):
            a, b = sets
            good = len(a - b) >= 2 or len(b - a) >= 2
            if good != (self.kind == "two_cycle_good"):
                raise ValueError("two-cycle classification mismatch")


# -- degree metrics ------------------------------------------------------

def degree(G: Hypergraph, v: int) -> int:
    if not 0 <= v < G.num_vertices:
        raise ValueError(f"vertex {v} out of range")
    return len(G.edges_at(v))


def _check_edge(H: ConfigHypergraph, e: int) -> None:
    if not 0 <= e < H.num_ground_edges:
        raise ValueError(f"G-edge id {e} out of range")


def i_degree(H: ConfigHypergraph, e: int, i: int) -> int:
    """Number of configurations of size ``i`` containing G-edge ``e``."""
    _check_edge(H, e)
    if i < 2:
        raise ValueError("i must be at least 2")
    return sum(1 for c in H.configs_at(e) if len(H.configs[c]) == i)


def pair_codegree(G: Hypergraph, u: int, v: int) -> int:
    if u == v:
        raise ValueError("codegree needs two distinct vertices")
    for x in (u, v):
        if not 0 <= x < G.num_vertices:
            raise ValueError(f"vertex {x} out of range")
    at_u = G.edges_at(u)
    return int(sum(1 for f in at_u if v in G.edge(int(f))))


def cross_i_codegree(G: Hypergraph, H: ConfigHypergraph, v: int, e: int, i: int | None = None) -> int:
    """Configurations (of size ``i``, or any size) containing ``e`` and an edge at ``v``."""
    _check_edge(H, e)
    if v in G.edge(e):
        raise ValueError("vertex lies in the edge")
    at_v = set(int(f) for f in G.edges_at(v))
    count = 0
    for c in H.configs_at(e):
        cfg = H.configs[c]
        if i is not None and len(cfg) != i:
            continue
        if at_v.intersection(cfg):
            count += 1
    return count


def max_codegree_with(G: Hypergraph, H: ConfigHypergraph) -> int:
    """Maximum over ``v`` and ``e`` with ``v`` not in ``e`` of :func:`cross_i_codegree` summed over sizes."""
    best = 0
    edge_sets = [set(G.edge(f)) for f in range(G.num_edges)]
    for e in range(H.num_ground_edges):
        counts: Counter = Counter()
        for c in H.configs_at(e):
            touched = set()
            for f in H.configs[c]:
                if f != e:
                    touched |= edge_sets[f]
            touched -= edge_sets[e]
            counts.update(touched)
        if counts:
            best = max(best, max(counts.values()))
    return best


def kl_codegree_max(H: ConfigHypergraph, k: int, l: int) -> int:
    """Largest number of size-``k`` configurations sharing a common ``l``-set."""
    if not 2 <= l < k:
        raise ValueError("need 2 <= l < k")
    counts: Counter = Counter()
    for c in H.configs:
        if len(c) == k:
            counts.update(combinations(c, l))
    return max(counts.values()) if counts else 0


def weighted_degree(H: ConfigHypergraph, D: float, e: int) -> float:
    """``sum_i d_{H,i}(e) (i-1) / D^(i-1)``."""
    if D < 1:
        raise ValueError("D must be at least 1")
    _check_edge(H, e)
    total = 0.0
    for c in H.configs_at(e):
        s = len(H.configs[c])
        total += (s - 1) / float(D) ** (s - 1)
    return total


def max_weighted_degree(H: ConfigHypergraph, D: float) -> float:
    w = H.weighted_degrees(D)
    return float(w.max()) if len(w) else 0.0


# -- cycles ----------------------------------------------------------------

def girth(H: ConfigHypergraph, cap: int = 4) -> tuple[int, CycleWitness] | None:
    """Shortest i-cycle of ``H`` with ``i <= cap``, or ``None``.

    An i-cycle of ``H`` is a cycle of length ``2i`` in the bipartite incidence
    graph between configurations and G-edges; a BFS from every configuration
    node, cut at depth ``cap``, finds the shortest one.
    """
    if cap < 2:
        raise ValueError("cap must be at least 2")
    h = H.num_configs
    ptr_e, ind_e = H.incidence

    def neighbours(node: int):
        if node < h:
            return (h + int(x) for x in H.configs[node])
        e = node - h
        return (int(x) for x in ind_e[ptr_e[e] : ptr_e[e + 1]])

    best_len = 2 * cap + 1
    best_cycle = None
    for root in range(h):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best_len:
                break
            for w in neighbours(u):
                if w == parent[u]:
                    continue
                if w in dist:
                    length = dist[u] + dist[w] + 1
                    if length < best_len:
                        cyc = _closed_walk(parent, u, w)
                        if cyc is not None:
                            best_len, best_cycle = length, cyc
                    continue
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
        if best_len == 4:
            break
    if best_cycle is None:
        return None
    # rotate so the walk starts on a configuration node
    if best_cycle[0] >= h:
        best_cycle = best_cycle[1:] + best_cycle[:1]
    cfgs = tuple(best_cycle[0::2])
    links = tuple(x - h for x in best_cycle[1::2])
    i = len(cfgs)
    if i == 2:
        a, b = set(H.configs[cfgs[0]]), set(H.configs[cfgs[1]])
        kind = "two_cycle_good" if len(a - b) >= 2 or len(b - a) >= 2 else "two_cycle_bad"
        return i, CycleWitness(kind, cfgs, links)
    loose = {3: "loose_triangle", 4: "loose_four_cycle"}.get(i)
    if loose is not None:
        witness = CycleWitness(loose, cfgs, links)
        try:
            witness.validate(H)
            return i, witness
        except ValueError:
            pass
    return i, CycleWitness("generic_i_cycle", cfgs, links)


def _closed_walk(parent: dict, u: int, w: int) -> list[int] | None:
    pu, pw = [], []
    x = u
    while x != -1:
        pu.append(x)
        x = parent[x]
    x = w
    while x != -1:
        pw.append(x)
        x = parent[x]
    # pu, pw end at the root; the cycle is u..root..w
    # root .. u, then w .. child of root
    cyc = pu[::-1] + pw[:-1]
    if len(set(cyc)) != len(cyc) or len(cyc) % 2:
        return None
    return cyc


def _pair_intersections(H: ConfigHypergraph) -> dict[tuple[int, int], list[int]]:
    shared: dict[tuple[int, int], list[int]] = defaultdict(list)
    for e in range(H.num_ground_edges):
        cs = sorted(int(c) for c in H.configs_at(e))
        for a, b in combinations(cs, 2):
            shared[(a, b)].append(e)
    return shared


def find_short_cycles(H: ConfigHypergraph) -> list[CycleWitness]:
    """All 2-cycles (good or bad), loose triangles and loose 4-cycles of ``H``.

    Each cycle is reported once: 2-cycles per configuration pair, loose
    triangles and loose 4-cycles per configuration set (a set of four
    configurations carries at most one loose 4-cycle).
    """
    shared = _pair_intersections(H)
    out: list[CycleWitness] = []
    meet1: dict[int, dict[int, int]] = defaultdict(dict)
    meets: dict[int, set[int]] = defaultdict(set)
    for (a, b), common in shared.items():
        meets[a].add(b)
        meets[b].add(a)
        if len(common) >= 2:
            sa, sb = set(H.configs[a]), set(H.configs[b])
            kind = "two_cycle_good" if len(sa - sb) >= 2 or len(sb - sa) >= 2 else "two_cycle_bad"
            out.append(CycleWitness(kind, (a, b), (common[0], common[1])))
        else:
            meet1[a][b] = common[0]
            meet1[b][a] = common[0]

    for a in sorted(meet1):
        nbrs = sorted(x for x in meet1[a] if x > a)
        for b, c in combinations(nbrs, 2):
            if c in meet1[b]:
                v_ab, v_bc, v_ca = meet1[a][b], meet1[b][c], meet1[c][a]
                if len({v_ab, v_bc, v_ca}) == 3:
                    out.append(CycleWitness("loose_triangle", (a, b, c), (v_ab, v_bc, v_ca)))

    seen: set[frozenset] = set()
    for a in sorted(meet1):
        across: dict[int, list[int]] = defaultdict(list)
        for b in meet1[a]:
            for c in meet1[b]:
                if c > a and c not in meets[a]:
                    across[c].append(b)
        for c, mids in across.items():
            for b, d in combinations(sorted(mids), 2):
                if d in meets[b]:
                    continue
                key = frozenset((a, b, c, d))
                if key in seen:
                    continue
                seen.add(key)
                links = (meet1[a][b], meet1[b][c], meet1[c][d], meet1[d][a])
                out.append(CycleWitness("loose_four_cycle", (a, b, c, d), links))
    return out


def short_cycle_census(H: ConfigHypergraph) -> tuple[set[int], dict[str, int]]:
    """Configurations on some cycle of length <= 4, and cycle counts by kind.

    Agrees with ``find_short_cycles`` but never lists loose 4-cycles one by
    one, whose number grows quadratically in the codegree of dense ``H``.
    """
    shared = _pair_intersections(H)
    on_cycle: set[int] = set()
    counts = {"two_cycle_good": 0, "two_cycle_bad": 0, "loose_triangle": 0, "loose_four_cycle": 0}
    meet1: dict[int, dict[int, int]] = defaultdict(dict)
    meets: dict[int, set[int]] = defaultdict(set)
    for (a, b), common in shared.items():
        meets[a].add(b)
        meets[b].add(a)
        if len(common) >= 2:
            sa, sb = set(H.configs[a]), set(H.configs[b])
            good = len(sa - sb) >= 2 or len(sb - sa) >= 2
            counts["two_cycle_good" if good else "two_cycle_bad"] += 1
            on_cycle.update((a, b))
        else:
            meet1[a][b] = common[0]
            meet1[b][a] = common[0]

    for a in meet1:
        nbrs = sorted(x for x in meet1[a] if x > a)
        for b, c in combinations(nbrs, 2):
            if c in meet1[b] and len({meet1[a][b], meet1[b][c], meet1[c][a]}) == 3:
                counts["loose_triangle"] += 1
                on_cycle.update((a, b, c))

    # every loose 4-cycle is seen once from each of its two diagonals
    doubled = 0
    for a in meet1:
        across: dict[int, list[int]] = defaultdict(list)
        for b in meet1[a]:
            for c in meet1[b]:
                if c > a and c not in meets[a]:
                    across[c].append(b)
        for c, mids in across.items():
            if len(mids) < 2:
                continue
            mid_set = set(mids)
            pairs = 0
            for b in mids:
                partners = len(mid_set) - 1 - len(meets[b] & mid_set)
                if partners:
                    on_cycle.add(b)
                    pairs += partners
            if pairs:
                on_cycle.update((a, c))
                doubled += pairs // 2
    counts["loose_four_cycle"] = doubled // 2
    return on_cycle, {k: v for k, v in counts.items() if v}


# -- matchings ---------------------------------------------------------------

def is_matching(G: Hypergraph, edge_ids: Iterable[int]) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``edge_ids`` are pairwise vertex-disjoint; on failure one clashing pair."""
    ids = sorted(set(int(x) for x in edge_ids))
    owner: dict[int, int] = {}
    for f in ids:
        if not 0 <= f < G.num_edges:
            raise ValueError(f"edge id {f} out of range")
        for v in G.edge(f):
            if v in owner:
                return False, (owner[v], f)
            owner[v] = f
    return True, None


def is_h_avoiding(H: ConfigHypergraph, M: Iterable[int], G: Hypergraph | None = None
                  ) -> tuple[bool, tuple[int, ...] | None]:
    """Whether matching ``M`` spans no configuration of ``H``.

    Raises ``ValueError`` if ``M`` is not a matching of ``G`` (``H.ground`` when
    ``G`` is omitted).
    """
    ground = G if G is not None else H.ground
    chosen = set(int(x) for x in M)
    if ground is not None:
        ok, pair = is_matching(ground, chosen)
        if not ok:
            raise ValueError(f"not a matching: edges {pair} intersect")
    for e in sorted(chosen):
        if not 0 <= e < H.num_ground_edges:
            raise ValueError(f"G-edge id {e} out of range")
        for c in H.configs_at(e):
            cfg = H.configs[c]
            if all(f in chosen for f in cfg):
                return False, cfg
    return True, None


def canonical_form(G: Hypergraph, H: ConfigHypergraph | None = None) -> tuple[dict, dict | None]:
    """JSON dicts with edges sorted lexicographically and configurations relabelled to match."""
    order = sorted(range(G.num_edges), key=lambda i: G.edge(i))
    new_id = {old: new for new, old in enumerate(order)}
    g = G.to_dict()
    g["edges"] = [list(G.edge(i)) for i in order]
    h = None
    if H is not None:
        h = {"configs": sorted(sorted(new_id[x] for x in c) for c in H.configs)}
    return g, h


def dumps_canonical(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
