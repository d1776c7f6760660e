"""Completing an A-perfect configuration-avoiding matching by Moser–Tardos resampling.

Every A-vertex picks one incident edge uniformly at random.  While some bad
event holds (two picks share a vertex, or the picks contain a whole
configuration) the A-vertices involved in the first such event redraw.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .hypercore import ConfigHypergraph, Hypergraph, max_weighted_degree
from .rng import stream

__all__ = ["Assignment", "BadEvent", "FinishResult", "find_bad_event", "finish_matching", "default_budget",
           "check_hypotheses"]

log = logging.getLogger(__name__)


@dataclass
class Assignment:
    """``choice[a]`` is the edge picked by A-vertex ``a``."""

    choice: dict[int, int]

    def edges(self) -> list[int]:
        return [self.choice[a] for a in sorted(self.choice)]


@dataclass(frozen=True)
class BadEvent:
    kind: str  # "pair_conflict" or "configuration"
    witness: tuple[int, ...]  # G-edge ids
    a_vertices: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness), "a_vertices": list(self.a_vertices)}


@dataclass
class FinishResult:
    success: bool
    assignment: Assignment
    resamples: int
    budget: int
    stuck: list[BadEvent] = field(default_factory=list)
    hypotheses: dict = field(default_factory=dict)
    G: Hypergraph | None = field(default=None, repr=False)
    H: ConfigHypergraph | None = field(default=None, repr=False)

    @property
    def matching(self) -> frozenset[int]:
        if not self.success:
            raise ValueError("no matching: the finisher ran out of budget")
        return frozenset(self.assignment.choice.values())

    def partial_matching(self) -> frozenset[int]:
        """Greedy conflict-free subset of the last assignment, in A-vertex order."""
        if self.success:
            return self.matching
        used: set[int] = set()
        taken: set[int] = set()
        for a in sorted(self.assignment.choice):
            e = self.assignment.choice[a]
            verts = set(self.G.edge(e))
            if verts & used:
                continue
            closes = any(all(f in taken for f in self.H.configs[j] if f != e) for j in self.H.configs_at(e))
            if closes:
                continue
            used |= verts
            taken.add(e)
        return frozenset(taken)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "resamples": self.resamples,
            "budget": self.budget,
            "assignment": {str(a): e for a, e in sorted(self.assignment.choice.items())},
            "stuck": [ev.to_dict() for ev in self.stuck],
            "hypotheses": self.hypotheses,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_budget(G: Hypergraph, H: ConfigHypergraph) -> int:
    return 1000 * (len(G.bipartition[0]) + H.num_configs)


def check_hypotheses(G: Hypergraph, H: ConfigHypergraph) -> dict:
    """Degree and weighted-degree conditions under which success is guaranteed."""
    deg = G.degrees()
    in_a = G.in_a
    r = G.rank if G.num_edges else 2
    d_a = int(deg[in_a].min()) if in_a.any() else 0
    D = max(1, int(deg[~in_a].max()) if (~in_a).any() and G.num_edges else 1)
    w = float(max_weighted_degree(H, D)) if H.num_configs else 0.0
    out = {"min_a_degree": d_a, "max_b_degree": D, "r": r, "weighted_degree": w,
           "a_degree_ok": d_a >= 8 * r * D, "weighted_degree_ok": w <= 1.0}
    out["satisfied"] = out["a_degree_ok"] and out["weighted_degree_ok"]
    return out


class _State:
    """Vectorized view of an assignment used inside the resample loop."""

    def __init__(self, G: Hypergraph, H: ConfigHypergraph):
        self.G, self.H = G, H
        self.a_list = np.asarray(G.bipartition[0], dtype=np.int64)
        self.a_pos = np.full(G.num_vertices, -1, dtype=np.int64)
        self.a_pos[self.a_list] = np.arange(len(self.a_list))
        self.options = [G.edges_at(int(a)) for a in self.a_list]
        self.owner = G.a_vertex_of_edges() if G.num_edges else np.zeros(0, dtype=np.int64)
        self.in_b = ~G.in_a

    def first_event(self, chosen: np.ndarray) -> BadEvent | None:
        G, H = self.G, self.H
        sizes = G.edge_sizes[chosen]
        verts = G.indices[(np.repeat(G.indptr[chosen], sizes) + np.arange(sizes.sum())
                           - np.repeat(np.cumsum(sizes) - sizes, sizes))]
        owners = np.repeat(self.a_list, sizes)
        keep = self.in_b[verts]
        verts, owners = verts[keep], owners[keep]
        if len(verts):
            order = np.lexsort((owners, verts))
            v_s, o_s = verts[order], owners[order]
            dup = np.flatnonzero(v_s[1:] == v_s[:-1])
            if len(dup):
                # smallest owner pair at each shared vertex, then the smallest pair overall
                starts = dup[np.r_[True, v_s[dup[1:]] != v_s[dup[:-1]]]] if len(dup) > 1 else dup
                pairs = np.stack([o_s[starts], o_s[starts + 1]], axis=1)
                best = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))[0]]
                a1, a2 = int(best[0]), int(best[1])
                e1 = int(chosen[self.a_pos[a1]])
                e2 = int(chosen[self.a_pos[a2]])
                return BadEvent("pair_conflict", (e1, e2), (a1, a2))
        if H.num_configs:
            mask = np.zeros(G.num_edges, dtype=bool)
            mask[chosen] = True
            full = np.add.reduceat(mask[H.indices].astype(np.int64), H.indptr[:-1]) == H.sizes
            hit = np.flatnonzero(full)
            if len(hit):
                cfg = H.configs[int(hit[0])]
                return BadEvent("configuration", tuple(cfg), tuple(sorted(int(self.owner[e]) for e in cfg)))
        return None


def _validate_assignment(G: Hypergraph, assignment: Assignment) -> np.ndarray:
    a_list = G.bipartition[0]
    missing = [a for a in a_list if a not in assignment.choice]
    if missing:
        raise ValueError(f"assignment misses A-vertices {missing[:5]}")
    chosen = np.asarray([assignment.choice[a] for a in a_list], dtype=np.int64)
    owner = G.a_vertex_of_edges()
    if len(chosen) and (owner[chosen] != np.asarray(a_list)).any():
        raise ValueError("assignment picks an edge not incident with its A-vertex")
    return chosen


def find_bad_event(G: Hypergraph, H: ConfigHypergraph, assignment: Assignment) -> BadEvent | None:
    """First realized bad event: pair conflicts by A-vertex pair, then configurations by id."""
    if not G.is_bipartite:
        raise ValueError("find_bad_event needs a bipartite hypergraph")
    chosen = _validate_assignment(G, assignment)
    return _State(G, H).first_event(chosen)


def finish_matching(G: Hypergraph, H: ConfigHypergraph, seed: int, *, budget: int | None = None) -> FinishResult:
    """Resample until the picks form an A-perfect matching spanning no configuration.

    Raises ``ValueError`` when some A-vertex has no edge.  When ``budget``
    resamples do not suffice the result has ``success=False``, the last
    assignment and the events still realized by it.
    """
    if not G.is_bipartite:
        raise ValueError("finish_matching needs a bipartite hypergraph")
    if H.num_ground_edges != G.num_edges:
        raise ValueError("H does not configure G")
    state = _State(G, H)
    empty = [int(a) for a, opts in zip(state.a_list, state.options) if len(opts) == 0]
    if empty:
        raise ValueError(f"A-vertices without edges: {empty[:5]}")
    hyp = check_hypotheses(G, H)
    if not hyp["satisfied"]:
        log.info("finisher hypotheses not met: %s", hyp)
    budget = default_budget(G, H) if budget is None else int(budget)

    rng = stream(seed, 0, "finish")
    n_opts = np.asarray([len(o) for o in state.options], dtype=np.int64)
    picks = (rng.random(len(n_opts)) * n_opts).astype(np.int64)
    chosen = np.asarray([state.options[k][picks[k]] for k in range(len(n_opts))], dtype=np.int64)

    resamples = 0
    event = state.first_event(chosen)
    while event is not None and resamples < budget:
        for a in event.a_vertices:
            k = int(state.a_pos[a])
            chosen[k] = state.options[k][int(rng.random() * n_opts[k])]
        resamples += 1
        event = state.first_event(chosen)

    assignment = Assignment({int(a): int(e) for a, e in zip(state.a_list, chosen)})
    if event is None:
        return FinishResult(True, assignment, resamples, budget, [], hyp, G, H)
    return FinishResult(False, assignment, resamples, budget, _all_events(state, chosen), hyp, G, H)


def _all_events(state: _State, chosen: np.ndarray) -> list[BadEvent]:
    G, H = state.G, state.H
    out = []
    by_vertex: dict[int, list[int]] = {}
    for k, e in enumerate(chosen):
        for v in G.edge(int(e)):
            if state.in_b[v]:
                by_vertex.setdefault(v, []).append(k)
    pairs = set()
    for ks in by_vertex.values():
        for i in range(len(ks)):
            for j in range(i + 1, len(ks)):
                pairs.add((min(ks[i], ks[j]), max(ks[i], ks[j])))
    for i, j in sorted(pairs):
        out.append(BadEvent("pair_conflict", (int(chosen[i]), int(chosen[j])),
                            (int(state.a_list[i]), int(state.a_list[j]))))
    picked = set(int(e) for e in chosen)
    for cfg in H.configs:
        if picked.issuperset(cfg):
            out.append(BadEvent("configuration", tuple(cfg), tuple(sorted(int(state.owner[e]) for e in cfg))))
    return out
