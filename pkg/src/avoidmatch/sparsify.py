"""Random sparsification to a configuration hypergraph of girth at least five."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .hypercore import (ConfigHypergraph, CycleWitness, Hypergraph, girth, max_weighted_degree,
                        short_cycle_census)
from .rng import uniforms

__all__ = ["SparsifyReport", "SparsifyResult", "GirthViolation", "sampling_probability",
           "short_cycle_edge_set", "sparsify"]

log = logging.getLogger(__name__)


class GirthViolation(RuntimeError):
    """The residual still has a cycle of length at most four; indicates a bug."""


@dataclass
class SparsifyReport:
    p: float
    D: float
    sampled_edges: int
    deleted_edges: int
    kept_edges: int
    short_cycles: dict = field(default_factory=dict)
    degree_window_violations: int = 0
    max_weighted_degree: float = 0.0
    girth_certificate: dict | None = None
    p_overridden: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class SparsifyResult:
    G: Hypergraph
    H: ConfigHypergraph
    report: SparsifyReport
    kept: np.ndarray  # input edge id of every output edge

    def __iter__(self):
        return iter((self.G, self.H, self.report, self.kept))


def sampling_probability(D: float, beta: float, g: int) -> float:
    return min(1.0, float(D) ** (beta / (4 * g) - 1.0))


def short_cycle_edge_set(H0: ConfigHypergraph, cycles: list[CycleWitness] | None = None) -> set[int]:
    """Every G-edge lying in a configuration that takes part in a 2-cycle, loose triangle or loose 4-cycle."""
    members = short_cycle_census(H0)[0] if cycles is None else {j for c in cycles for j in c.config_edge_ids}
    out: set[int] = set()
    for j in members:
        out.update(H0.configs[j])
    return out


def _window_violations(G: Hypergraph, kept: np.ndarray, p: float, D: float, beta: float, g: int) -> int:
    before = G.degrees()
    after = G.edge_subgraph(kept).degrees()
    rel = D ** (-beta / (18 * g))
    slack = D ** (beta / (6 * g))
    lo = p * before * (1 - rel) - slack
    hi = p * before * (1 + rel) + slack
    return int(((after < lo) | (after > hi)).sum())


def sparsify(G: Hypergraph, oracle, beta: float, g: int, seed: int, *,
             D: float | None = None, p: float | None = None) -> SparsifyResult:
    """Sample edges independently, then drop every edge touched by a short cycle.

    ``oracle.restricted(ids)`` must return the configurations lying inside
    ``ids``, relabelled to positions in ``ids``; :class:`~avoidmatch.designs.ExplicitOracle`
    and :class:`~avoidmatch.designs.steiner.SteinerOracle` both qualify.
    ``D`` defaults to the maximum degree (the common degree for regular
    hosts) and ``p`` to ``D^(beta/4g - 1)``;
    passing ``p`` explicitly is the desk-scale escape hatch.

    The output keeps every vertex; edge ``k`` of the output is input edge ``kept[k]``.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if g < 2:
        raise ValueError("g must be at least 2")
    deg = G.degrees()
    max_deg = int(deg.max()) if deg.size else 0
    if D is None:
        D = max(1.0, float(max_deg))
    elif max_deg > 2 * D:
        log.warning("maximum degree %d exceeds 2D = %g", max_deg, 2 * D)
    overridden = p is not None
    default_p = sampling_probability(D, beta, g)
    if p is None:
        p = default_p
    elif p > 2 * default_p:
        log.warning("p = %g is well above %g; short-cycle search cost grows fast and most samples get deleted",
                    p, default_p)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")

    u = uniforms(seed, 0, "sparsify-sample", G.num_edges)
    sampled = np.flatnonzero(u < p)
    H0 = oracle.restricted(sampled)
    members, kinds = short_cycle_census(H0)
    doomed = {e for j in members for e in H0.configs[j]}
    keep_pos = np.array(sorted(set(range(len(sampled))) - doomed), dtype=np.int64)
    kept = sampled[keep_pos]

    G1 = G.edge_subgraph(kept)
    H1 = H0.restrict(keep_pos, ground=G1)
    found = girth(H1, cap=4)
    if found is not None:
        raise GirthViolation(f"cycle of length {found[0]} survived deletion")

    pD = max(1.0, p * D)
    report = SparsifyReport(
        p=float(p), D=float(D),
        sampled_edges=int(len(sampled)),
        deleted_edges=int(len(doomed)),
        kept_edges=int(len(kept)),
        short_cycles=dict(sorted(kinds.items())),
        degree_window_violations=_window_violations(G, kept, p, D, beta, g),
        max_weighted_degree=float(max_weighted_degree(H1, pD)) if H1.num_configs else 0.0,
        p_overridden=overridden,
    )
    return SparsifyResult(G1, H1, report, kept)
