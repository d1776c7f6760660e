"""Brute-force checks of pipeline outputs.

Nothing here reuses the enumeration or cycle code of :mod:`avoidmatch.hypercore`,
:mod:`avoidmatch.designs` or :mod:`avoidmatch.sparsify`; only the plain data
containers are shared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Any, Iterable

import numpy as np

from .designs.instance import DesignInstance
from .hypercore import ConfigHypergraph, Hypergraph

__all__ = [
    "VerificationReport",
    "GuardExceeded",
    "verify_partial_design",
    "verify_no_configurations",
    "verify_matching_output",
    "girth_oracle_naive",
    "all_matchings_bruteforce",
]

PAIR_CHECK_GUARD = 10**6
CONFIG_CHECK_GUARD = 10**5
GIRTH_ORACLE_GUARD = 5000


class GuardExceeded(RuntimeError):
    pass


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, Any]] = field(default_factory=list)
    covered_fraction: float | None = None

    def add(self, name: str, ok: bool, witness: Any = None) -> None:
        if not ok and witness is None:
            raise ValueError("a failed check needs a witness")
        self.checks.append((name, bool(ok), witness))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[tuple[str, bool, Any]]:
        return [c for c in self.checks if not c[1]]

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        out = VerificationReport(self.checks + other.checks, self.covered_fraction)
        if out.covered_fraction is None:
            out.covered_fraction = other.covered_fraction
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "covered_fraction": self.covered_fraction,
            "checks": [{"name": n, "passed": ok, "witness": _plain(w)} for n, ok, w in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _plain(w):
    if isinstance(w, (set, frozenset, tuple, list)):
        return [_plain(x) for x in (sorted(w) if isinstance(w, (set, frozenset)) else w)]
    if isinstance(w, np.integer):
        return int(w)
    return w


def _rank(rset: tuple[int, ...]) -> int:
    return sum(comb(c, j) for j, c in enumerate(rset, start=1))


def verify_partial_design(S: DesignInstance) -> VerificationReport:
    """Every r-set of points lies in at most one block."""
    if len(S.blocks) > PAIR_CHECK_GUARD:
        raise GuardExceeded(f"{len(S.blocks)} blocks exceeds the pair-check guard")
    total = comb(S.n, S.r)
    report = VerificationReport()
    witness = None
    if S.r <= 3:
        covered = np.zeros(total, dtype=np.int8)
        for b in S.blocks:
            for rs in combinations(b, S.r):
                k = _rank(rs)
                if covered[k]:
                    witness = witness or rs
                covered[k] = 1
        count = int(covered.sum())
    else:
        seen: set[tuple[int, ...]] = set()
        for b in S.blocks:
            for rs in combinations(b, S.r):
                if rs in seen:
                    witness = witness or rs
                seen.add(rs)
        count = len(seen)
    report.add("r-sets covered at most once", witness is None, witness)
    report.covered_fraction = count / total if total else 0.0
    return report


def verify_no_configurations(S: DesignInstance, g: int | None = None, *, naive: bool = False) -> VerificationReport:
    """No ``i`` blocks span at most ``i(q-r)+r`` points, for ``2 <= i <= g``.

    Any such family contains a connected one, so only connected families are
    grown; the witness is the lexicographically smallest family of the smallest
    offending size.  ``naive=True`` scans all ``C(|S|, i)`` subsets instead.
    """
    g = S.g if g is None else g
    if g < 2:
        raise ValueError("g must be at least 2")
    if len(S.blocks) > CONFIG_CHECK_GUARD:
        raise GuardExceeded(f"{len(S.blocks)} blocks exceeds the configuration-check guard")
    q, r = S.q, S.r
    blocks = [frozenset(b) for b in S.blocks]
    hits = _naive_configs(blocks, q, r, g) if naive else _connected_configs(blocks, q, r, g)
    report = VerificationReport()
    if hits:
        i = min(len(h) for h in hits)
        first = min(h for h in hits if len(h) == i)
        report.add(f"no configurations for 2 <= i <= {g}", False,
                   {"i": i, "blocks": [sorted(S.blocks[k]) for k in first]})
    else:
        report.add(f"no configurations for 2 <= i <= {g}", True)
    return report


def _limit(i: int, q: int, r: int) -> int:
    return i * (q - r) + r


def _naive_configs(blocks, q, r, g) -> list[tuple[int, ...]]:
    out = []
    for i in range(2, g + 1):
        for combo in combinations(range(len(blocks)), i):
            if len(frozenset().union(*(blocks[k] for k in combo))) <= _limit(i, q, r):
                out.append(combo)
        if out:
            return out
    return out


def _connected_configs(blocks, q, r, g) -> list[tuple[int, ...]]:
    incident: dict[frozenset, list[int]] = {}
    point_blocks: dict[int, list[int]] = {}
    for k, b in enumerate(blocks):
        for p in b:
            point_blocks.setdefault(p, []).append(k)
        for sub in combinations(sorted(b), r):
            incident.setdefault(frozenset(sub), []).append(k)
    cap = _limit(g, q, r)
    hits: list[tuple[int, ...]] = []
    for first in range(len(blocks)):
        visited = set()
        frontier = [(first,)]
        while frontier:
            fam = frontier.pop()
            span = frozenset().union(*(blocks[k] for k in fam))
            i = len(fam)
            if i >= 2 and len(span) <= _limit(i, q, r):
                hits.append(tuple(sorted(fam)))
                continue
            if i == g:
                continue
            room = cap - len(span)
            if q - room >= r:
                pool = set()
                for sub in combinations(sorted(span), r):
                    pool.update(incident.get(frozenset(sub), ()))
            else:
                pool = {k for p in span for k in point_blocks[p]}
            for k in pool:
                if k <= first or k in fam:
                    continue
                if len(blocks[k] - span) > room:
                    continue
                nxt = tuple(sorted(fam + (k,)))
                if nxt not in visited:
                    visited.add(nxt)
                    frontier.append(nxt)
    return hits


def verify_matching_output(G: Hypergraph, H: ConfigHypergraph | None, M: Iterable[int], *,
                           require_a_perfect: bool | None = None) -> VerificationReport:
    """Matching, H-avoiding and (for bipartite ``G`` by default) A-perfect."""
    ids = sorted(int(x) for x in M)
    report = VerificationReport()
    bad_ids = [x for x in ids if not 0 <= x < G.num_edges]
    if bad_ids:
        raise ValueError(f"edge ids out of range: {bad_ids[:5]}")
    if len(set(ids)) != len(ids):
        dup = next(x for x in ids if ids.count(x) > 1)
        report.add("edges distinct", False, dup)

    owner: dict[int, int] = {}
    clash = None
    for f in ids:
        for v in G.indices[G.indptr[f] : G.indptr[f + 1]]:
            v = int(v)
            if v in owner and owner[v] != f and clash is None:
                clash = (owner[v], f)
            owner.setdefault(v, f)
    report.add("matching", clash is None, clash)

    if H is not None:
        chosen = set(ids)
        spanned = next((tuple(c) for c in H.configs if chosen.issuperset(c)), None)
        report.add("H-avoiding", spanned is None, spanned)

    if require_a_perfect is None:
        require_a_perfect = G.is_bipartite
    if require_a_perfect:
        if not G.is_bipartite:
            raise ValueError("A-perfection needs a bipartite hypergraph")
        missing = next((a for a in G.bipartition[0] if a not in owner), None)
        report.add("A-perfect", missing is None, missing)
    return report


def girth_oracle_naive(H: ConfigHypergraph, cap: int = 4) -> int | None:
    """Shortest alternating sequence ``C_1 v_1 ... C_i v_i`` with ``i <= cap``, by exhaustive search.

    Sequences are extended one configuration at a time through a shared G-edge,
    trying every choice of link; no incidence-graph reasoning is used.
    """
    if len(H.configs) > GIRTH_ORACLE_GUARD:
        raise GuardExceeded(f"{len(H.configs)} configurations exceeds the oracle guard")
    sets = [frozenset(c) for c in H.configs]
    n = len(sets)
    for i in range(2, cap + 1):
        if i == 2:
            for a, b in combinations(range(n), 2):
                if len(sets[a] & sets[b]) >= 2:
                    return 2
            continue
        for start in range(n):
            if _cycle_from(sets, start, i):
                return i
    return None


def _cycle_from(sets, start: int, length: int) -> bool:
    def walk(seq: list[int], links: list[int]) -> bool:
        last = seq[-1]
        if len(seq) == length:
            closing = sets[last] & sets[start]
            return any(v not in links for v in closing)
        for nxt in range(len(sets)):
            if nxt in seq:
                continue
            for v in sets[last] & sets[nxt]:
                if v in links:
                    continue
                if walk(seq + [nxt], links + [v]):
                    return True
        return False

    return walk([start], [])


def all_matchings_bruteforce(G: Hypergraph) -> set[frozenset[int]]:
    """Every matching of a small ``G`` (including the empty one)."""
    edges = [frozenset(G.edge(i)) for i in range(G.num_edges)]
    out = {frozenset()}
    for k in range(1, G.num_edges + 1):
        grew = False
        for combo in combinations(range(G.num_edges), k):
            if all(not (edges[a] & edges[b]) for a, b in combinations(combo, 2)):
                out.add(frozenset(combo))
                grew = True
        if not grew:
            break
    return out

