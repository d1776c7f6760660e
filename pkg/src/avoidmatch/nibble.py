"""Semi-random nibble: single rounds, their bipartite variant and the multi-round drivers.

A round samples edges, drops edges that nearly complete a configuration (plus
an equalizing coin flip so every edge is dropped with the same probability),
commits the isolated surviving samples and returns the residual instance.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .hypercore import ConfigHypergraph, Hypergraph, girth, is_h_avoiding, is_matching
from .rng import uniforms

__all__ = [
    "NibbleParams",
    "NibbleSchedule",
    "RoundOutcome",
    "MatchingResult",
    "survival_prob",
    "flip_probability",
    "nibble_round",
    "removal_mask",
    "bipartite_round",
    "make_schedule",
    "run_nibble",
    "run_bipartite",
    "diagnostics",
    "dump_trace_jsonl",
    "load_trace_jsonl",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NibbleParams:
    D: float
    epsilon: float
    w: float
    gamma: float = 0.0
    D_A: float | None = None

    def __post_init__(self):
        if not self.D >= 1:
            raise ValueError(f"D must be at least 1, got {self.D}")
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.w < 0 or self.gamma < 0:
            raise ValueError("w and gamma must be nonnegative")
        if self.epsilon * self.w > 1 + 1e-12:
            raise ValueError(f"epsilon * w = {self.epsilon * self.w:.4g} exceeds 1")
        if self.D_A is not None and self.D_A <= 0:
            raise ValueError("D_A must be positive")

    @property
    def p(self) -> float:
        return self.epsilon / self.D

    def next_D(self, r: int) -> float:
        return self.D * math.exp(-self.epsilon * (r - 1 + self.w))

    def next_D_bipartite(self, r: int) -> tuple[float, float]:
        """``(D_A', D')`` targets of a bipartite round."""
        if self.D_A is None:
            raise ValueError("bipartite targets need D_A")
        e = self.epsilon
        d_a = self.D_A * math.exp(-e * (r - 1 + self.w + self.gamma))
        d = self.D * math.exp(-e * (r - 2 + self.D_A / self.D + self.w - self.gamma))
        return d_a, d

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class NibbleSchedule:
    rounds: list[NibbleParams]
    stop_index: int
    mode: str = "plain"
    D0: float = 0.0
    exponent: float = 0.0
    r: int = 2
    g: int = 2
    T: float = 0.0
    overrides: dict = field(default_factory=dict)

    @property
    def follows_formulas(self) -> bool:
        return not self.overrides

    def __len__(self) -> int:
        return len(self.rounds)

    def to_dict(self) -> dict:
        key = "beta" if self.mode == "plain" else "alpha"
        return {
            "mode": self.mode, "D0": self.D0, key: self.exponent, "r": self.r, "g": self.g,
            "T": self.T, "stop_index": self.stop_index, "overrides": dict(self.overrides),
            "follows_formulas": self.follows_formulas,
            "rounds": [p.to_dict() for p in self.rounds],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NibbleSchedule":
        """Rebuild from either a full record or a ``{"mode", "D0", "beta"|"alpha", ...}`` request."""
        if "rounds" in data:
            mode = data.get("mode", "plain")
            return cls(
                [NibbleParams(**p) for p in data["rounds"]], data["stop_index"], mode,
                data.get("D0", 0.0), data.get("beta", data.get("alpha", 0.0)),
                data.get("r", 2), data.get("g", 2), data.get("T", 0.0), dict(data.get("overrides", {})),
            )
        mode = data.get("mode", "plain")
        exponent = data["beta"] if mode == "plain" else data["alpha"]
        return make_schedule(data["D0"], exponent, data["r"], data.get("g", 2), mode, data.get("overrides"))


@dataclass
class RoundOutcome:
    committed: np.ndarray  # input edge ids of E'
    residual_g: Hypergraph
    residual_h: ConfigHypergraph
    kept: np.ndarray  # input edge id of every residual edge
    alive: np.ndarray  # vertex mask of V'
    stats: dict

    @property
    def matching(self) -> frozenset[int]:
        return frozenset(int(e) for e in self.committed)


@dataclass
class MatchingResult:
    edges: frozenset[int]
    trace: list[dict]
    success: bool = True
    message: str = ""
    finisher: dict | None = None

    def to_dict(self) -> dict:
        return {
            "edges": sorted(self.edges), "success": self.success, "message": self.message,
            "finisher": self.finisher, "rounds": len(self.trace),
        }


# -- per-edge probabilities -----------------------------------------------------

def survival_prob(degrees: Mapping[int, int], p: float) -> float:
    """Probability that no configuration through an edge is otherwise fully sampled."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    out = 1.0
    for i, d in degrees.items():
        if i < 2:
            raise ValueError("configuration sizes start at 2")
        out *= (1.0 - p ** (i - 1)) ** d
    return out


def _survival_vector(size_degrees: np.ndarray, p: float) -> np.ndarray:
    sizes = np.arange(size_degrees.shape[1])
    factor = 1.0 - np.power(p, np.maximum(sizes - 1, 0).astype(np.float64))
    factor[:2] = 1.0
    with np.errstate(divide="ignore"):
        logs = np.log(factor)
    logs[~np.isfinite(logs)] = -np.inf
    mat = size_degrees * logs
    mat[size_degrees == 0] = 0.0
    return np.exp(mat.sum(axis=1))


def flip_probability(params: NibbleParams, survival: float) -> float:
    """Probability that the equalizing coin keeps an edge with the given survival probability."""
    if not 0 < survival <= 1:
        raise ValueError("survival probability must lie in (0, 1]")
    q = (1.0 - params.epsilon * params.w) / survival
    if q > 1:
        log.debug("equalizing flip clamped: %.6g > 1", q)
        return 1.0
    return q


def _flip_vector(params: NibbleParams, survival: np.ndarray) -> tuple[np.ndarray, int]:
    keep = 1.0 - params.epsilon * params.w
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(survival > 0, keep / survival, np.inf)
    clamped = int((q > 1).sum())
    return np.minimum(q, 1.0), clamped


# -- one round ---------------------------------------------------------------------

def _reduce(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    if len(indptr) <= 1:
        return np.zeros(0, dtype=np.int64)
    out = np.add.reduceat(values, indptr[:-1]) if len(values) else np.zeros(len(indptr) - 1, dtype=np.int64)
    out[np.diff(indptr) == 0] = 0
    return out


def _near_complete(H: ConfigHypergraph, sampled: np.ndarray) -> np.ndarray:
    """Edges ``e`` with some configuration ``S`` such that ``S - e`` is fully sampled."""
    out = np.zeros(H.num_ground_edges, dtype=bool)
    if not H.num_configs:
        return out
    hit = sampled[H.indices]
    count = _reduce(hit.astype(np.int64), H.indptr)
    sizes = H.sizes
    full = count == sizes
    near = count == sizes - 1
    owner = np.repeat(np.arange(H.num_configs), sizes)
    flag = full[owner] | (near[owner] & ~hit)
    out[H.indices[flag]] = True
    return out


def _residual_h(H: ConfigHypergraph, committed: np.ndarray, keep: np.ndarray, remap: np.ndarray,
                ground: Hypergraph) -> ConfigHypergraph:
    if not H.num_configs:
        return ConfigHypergraph(ground.num_edges, (), ground, validate=False)
    in_c = committed[H.indices]
    in_k = keep[H.indices]
    ok = _reduce((in_c | in_k).astype(np.int64), H.indptr) == H.sizes
    configs = []
    for j in np.flatnonzero(ok):
        members = H.indices[H.indptr[j] : H.indptr[j + 1]]
        rest = remap[members[keep[members]]]
        if len(rest) < 2:
            raise AssertionError("residual configuration of size below two")
        configs.append(tuple(int(x) for x in rest))
    return ConfigHypergraph(ground.num_edges, configs, ground, validate=False)


def _histogram(values: np.ndarray, bins: int = 10) -> dict:
    if values.size == 0:
        return {"counts": [], "edges": []}
    counts, edges = np.histogram(values, bins=bins)
    return {"counts": counts.tolist(), "edges": [float(x) for x in edges]}


def _check_round_inputs(G: Hypergraph, H: ConfigHypergraph) -> None:
    if H.num_ground_edges != G.num_edges:
        raise ValueError("H does not configure G (edge counts differ)")


def _core_round(G, H, params, seed, round_index, alive, extra_block=None, phantom_cover=None):
    """Shared body of both round types; returns masks and counters."""
    m = G.num_edges
    p = params.p
    sampled = uniforms(seed, round_index, "edge-sample", m) < p
    survival = _survival_vector(H.size_degrees(), p)
    keep_prob, clamped = _flip_vector(params, survival)
    coin_zero = uniforms(seed, round_index, "flip", m) >= keep_prob
    clause_i = _near_complete(H, sampled)
    F0 = clause_i | coin_zero

    vcount = np.bincount(G.indices[np.repeat(sampled, G.edge_sizes)], minlength=G.num_vertices)
    if extra_block is not None:
        vcount = vcount + extra_block
    crowd = np.zeros(m, dtype=np.int64)
    if m:
        crowd = np.maximum.reduceat(vcount[G.indices], G.indptr[:-1]) if len(G.indices) else crowd
    E1 = sampled & (crowd == 1)
    committed = E1 & ~F0

    covered = np.zeros(G.num_vertices, dtype=bool)
    covered[G.indices[np.repeat(committed, G.edge_sizes)]] = True
    if phantom_cover is not None:
        covered |= phantom_cover
    new_alive = alive & ~covered
    ends_alive = _reduce((~new_alive[G.indices]).astype(np.int64), G.indptr) == 0
    keep = ends_alive & ~F0
    return dict(sampled=sampled, F0=F0, clause_i=clause_i, E1=E1, committed=committed,
                keep=keep, alive=new_alive, clamped=clamped)


def removal_mask(G: Hypergraph, H: ConfigHypergraph, params: NibbleParams, seed: int,
                 round_index: int = 0) -> tuple[np.ndarray, int]:
    """Boolean mask of F0 for one round draw, plus the number of clamped flips.

    Skips residual assembly, so it is cheap enough for Monte Carlo estimates
    of per-edge removal rates.
    """
    _check_round_inputs(G, H)
    masks = _core_round(G, H, params, seed, round_index, np.ones(G.num_vertices, dtype=bool))
    return masks["F0"], masks["clamped"]


def _assemble(G, H, params, masks, alive_before, next_D, round_index, seed, extra_stats=None):
    keep, committed = masks["keep"], masks["committed"]
    kept = np.flatnonzero(keep)
    remap = np.full(G.num_edges, -1, dtype=np.int64)
    remap[kept] = np.arange(len(kept))
    G1 = G.edge_subgraph(kept)
    H1 = _residual_h(H, committed, keep, remap, G1)

    alive = masks["alive"]
    deg = G1.degrees()[alive]
    D_eval = max(1.0, next_D)
    wdeg = H1.weighted_degrees(D_eval)
    n_before = int(alive_before.sum())
    stats = {
        "round": round_index,
        "seed": int(seed),
        "params": params.to_dict(),
        "p": params.p,
        "E0": int(masks["sampled"].sum()),
        "E1": int(masks["E1"].sum()),
        "E2": int(masks["sampled"].sum() - masks["E1"].sum()),
        "F0": int(masks["F0"].sum()),
        "F0_near_complete": int(masks["clause_i"].sum()),
        "committed": int(committed.sum()),
        "clamped": masks["clamped"],
        "vertices_before": n_before,
        "vertices_after": int(alive.sum()),
        "edges_before": int(G.num_edges),
        "edges_after": int(G1.num_edges),
        "configs_before": int(H.num_configs),
        "configs_after": int(H1.num_configs),
        "matched_fraction": (n_before - int(alive.sum())) / n_before if n_before else 0.0,
        "predicted_matched_fraction": params.epsilon / 2,
        "mean_degree_before": float(G.degrees()[alive_before].mean()) if n_before else 0.0,
        "mean_degree_after": float(deg.mean()) if deg.size else 0.0,
        "max_degree_after": int(deg.max()) if deg.size else 0,
        "predicted_D": next_D,
        "weighted_degree_D": D_eval,
        "max_weighted_degree_after": float(wdeg.max()) if wdeg.size else 0.0,
        "mean_weighted_degree_after": float(wdeg.mean()) if wdeg.size else 0.0,
        "predicted_w": params.w * (1 - params.epsilon / 2),
        "degree_hist": np.bincount(deg).tolist() if deg.size else [],
        "weighted_degree_hist": _histogram(wdeg),
    }
    if extra_stats:
        stats.update(extra_stats)
    return RoundOutcome(np.flatnonzero(committed), G1, H1, kept, alive, stats)


def _postconditions(G: Hypergraph, H: ConfigHypergraph, out: RoundOutcome) -> None:
    ok, pair = is_matching(G, out.committed)
    if not ok:
        raise AssertionError(f"committed edges {pair} intersect")
    ok, cfg = is_h_avoiding(H, out.committed)
    if not ok:
        raise AssertionError(f"committed edges span configuration {cfg}")


def nibble_round(G: Hypergraph, H: ConfigHypergraph, params: NibbleParams, seed: int, *,
                 round_index: int = 0, alive: np.ndarray | None = None) -> RoundOutcome:
    """One round of the nibble on ``(G, H)``.

    ``alive`` marks the current vertex set (all of ``V(G)`` by default); edges
    must lie inside it.  Residual edge ``k`` is input edge ``kept[k]``; the
    residual keeps every vertex id and marks ``V'`` in ``alive``.
    """
    _check_round_inputs(G, H)
    alive = np.ones(G.num_vertices, dtype=bool) if alive is None else np.asarray(alive, dtype=bool)
    r = G.rank if G.num_edges else 2
    masks = _core_round(G, H, params, seed, round_index, alive)
    out = _assemble(G, H, params, masks, alive, params.next_D(r), round_index, seed)
    _postconditions(G, H, out)
    return out


def _trim_a(G: Hypergraph, H: ConfigHypergraph, cap: int, seed: int, round_index: int):
    """Keep a random ``cap`` edges at every A-vertex of larger degree."""
    owner = G.a_vertex_of_edges()
    u = uniforms(seed, round_index, "trim", G.num_edges)
    order = np.lexsort((u, owner))
    rank_in_group = np.empty(G.num_edges, dtype=np.int64)
    sorted_owner = owner[order]
    starts = np.flatnonzero(np.r_[True, sorted_owner[1:] != sorted_owner[:-1]]) if len(order) else np.zeros(0, int)
    group_start = np.repeat(starts, np.diff(np.r_[starts, len(order)]))
    rank_in_group[order] = np.arange(len(order)) - group_start
    keep = np.flatnonzero(rank_in_group < cap)
    if len(keep) == G.num_edges:
        return G, H, np.arange(G.num_edges), 0
    return G.edge_subgraph(keep), H.restrict(keep), keep, G.num_edges - len(keep)


def bipartite_round(G: Hypergraph, H: ConfigHypergraph, params: NibbleParams, seed: int, *,
                    round_index: int = 0, alive: np.ndarray | None = None) -> RoundOutcome:
    """Bipartite round: A-degrees trimmed to ``ceil(D_A)``, B-vertices padded to ``ceil(D)``.

    The padding is simulated rather than built.  A B-vertex ``b`` of degree
    ``d`` carries ``ceil(D) - d`` phantom edges, each sampled with probability
    ``p``; a sampled phantom keeps ``b``'s real edges out of the isolated set,
    and a phantom that is isolated and passes the coin flip covers ``b``.
    Phantom edges never enter the output, so every committed edge is real.
    """
    if not G.is_bipartite:
        raise ValueError("bipartite_round needs a bipartite hypergraph")
    if params.D_A is None:
        raise ValueError("bipartite_round needs params.D_A")
    _check_round_inputs(G, H)
    alive = np.ones(G.num_vertices, dtype=bool) if alive is None else np.asarray(alive, dtype=bool)
    r = G.rank if G.num_edges else 2
    cap_a, cap_b = math.ceil(params.D_A - 1e-9), math.ceil(params.D - 1e-9)

    G_t, H_t, trim_ids, trimmed = _trim_a(G, H, cap_a, seed, round_index)
    in_a = G_t.in_a
    deg = G_t.degrees()
    a_short = int(((deg < cap_a) & in_a & alive).sum())
    pad = np.where(~in_a & alive, np.maximum(cap_b - deg, 0), 0)
    b_over = int(((deg > cap_b) & ~in_a & alive).sum())

    p = params.p
    u = uniforms(seed, round_index, "phantom-sample", G.num_vertices)
    # Number of sampled phantoms at b is Binomial(pad, p); draw it by inversion.
    phantom_hits = _binomial_by_inversion(pad, p, u)
    lone_real_free = phantom_hits == 1
    real_sampled = uniforms(seed, round_index, "edge-sample", G_t.num_edges) < p
    real_at = np.bincount(G_t.indices[np.repeat(real_sampled, G_t.edge_sizes)], minlength=G.num_vertices)
    outside = (cap_a - 1) + (r - 2) * (cap_b - 1)
    iso = (1 - p) ** max(outside, 0) * (1 - params.epsilon * params.w)
    v = uniforms(seed, round_index, "phantom-commit", G.num_vertices)
    phantom_cover = lone_real_free & (real_at == 0) & (v < iso)

    masks = _core_round(G_t, H_t, params, seed, round_index, alive, extra_block=phantom_hits,
                        phantom_cover=phantom_cover)
    d_a, d_b = params.next_D_bipartite(r)
    out = _assemble(G_t, H_t, params, masks, alive, d_b, round_index, seed, {
        "trimmed": trimmed,
        "a_below_floor_before": a_short,
        "b_above_ceiling_before": b_over,
        "phantom_edges": int(pad.sum()),
        "phantom_sampled": int(phantom_hits.sum()),
        "phantom_covered": int(phantom_cover.sum()),
        "D_A_target": d_a,
        "D_target": d_b,
    })
    a_alive = out.alive & in_a
    b_alive = out.alive & ~in_a
    deg1 = out.residual_g.degrees()
    out.stats["A_alive"] = int(a_alive.sum())
    out.stats["A_floor_after"] = int(deg1[a_alive].min()) if a_alive.any() else None
    out.stats["B_ceiling_after"] = int(deg1[b_alive].max()) if b_alive.any() else None
    out.committed = trim_ids[out.committed]
    out.kept = trim_ids[out.kept]
    _postconditions(G, H, out)
    return out


def _binomial_by_inversion(n: np.ndarray, p: float, u: np.ndarray) -> np.ndarray:
    """Binomial(n[k], p) sample driven by the single uniform ``u[k]``."""
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(len(n), dtype=np.int64)
    if p <= 0 or not n.any():
        return out
    if p >= 1:
        return n.copy()
    pmf = np.power(1 - p, n.astype(np.float64))
    cdf = pmf.copy()
    k = np.zeros(len(n), dtype=np.int64)
    todo = (u >= cdf) & (k < n)
    while todo.any():
        idx = np.flatnonzero(todo)
        pmf[idx] *= (n[idx] - k[idx]) / (k[idx] + 1) * (p / (1 - p))
        k[idx] += 1
        cdf[idx] += pmf[idx]
        todo = (u >= cdf) & (k < n)
    return k


# -- schedules -----------------------------------------------------------------------

_OVERRIDE_KEYS = {"epsilon", "rounds", "w0", "gamma0", "gamma", "T", "D_A0"}


def make_schedule(D0: float, exponent: float, r: int, g: int = 2, mode: str = "plain",
                  overrides: Mapping | None = None) -> NibbleSchedule:
    """Per-round parameters of the plain (``exponent`` = beta) or bipartite (= alpha) driver.

    ``overrides`` may set ``epsilon``, ``rounds`` (number of rounds), ``w0``,
    ``gamma0``/``gamma``, ``T`` or ``D_A0``; a schedule with any override is
    flagged as not following the formulas.
    """
    if D0 < 2:
        raise ValueError("D0 must be at least 2")
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if mode not in ("plain", "bipartite"):
        raise ValueError("mode must be 'plain' or 'bipartite'")
    overrides = dict(overrides or {})
    unknown = set(overrides) - _OVERRIDE_KEYS
    if unknown:
        raise ValueError(f"unknown schedule overrides: {sorted(unknown)}")
    lnD = math.log(D0)
    if mode == "plain":
        if exponent > 1 / (8 * r) and not overrides:
            log.warning("beta = %g exceeds 1/(8r) = %g", exponent, 1 / (8 * r))
        eps = overrides.get("epsilon", D0 ** (-7 * exponent / 6))
        T = overrides.get("T", exponent * lnD / (8 * r * eps))
        w0 = overrides.get("w0", exponent * lnD / 4)
        g0 = overrides.get("gamma0", D0 ** (-exponent))
        count = int(overrides.get("rounds", math.floor(T) + 1))
        rounds = []
        acc = 0.0
        for i in range(count):
            D_i = D0 * math.exp(-eps * (i * (r - 1) + w0 * acc))
            w_i = w0 * (1 - eps / 2) ** i
            rounds.append(NibbleParams(max(D_i, 1.0), eps, w_i, g0 * (1 + 6 * r * eps) ** i))
            acc += (1 - eps / 2) ** i
            if D_i < 1:
                break
        return NibbleSchedule(rounds, count, mode, float(D0), exponent, r, g, float(T), overrides)

    eps = overrides.get("epsilon", D0 ** (-7 * exponent / 6))
    gamma = overrides.get("gamma", D0 ** (-exponent) / 4)
    d_a0 = overrides.get("D_A0", D0 * (1 + D0 ** (-exponent)))
    w0 = overrides.get("w0", exponent * lnD / 2)
    T = overrides.get("T", math.log(8 * r * D0**exponent) / math.log(1 + eps / 2))
    count = int(overrides.get("rounds", math.floor(T) + 1))
    excess0 = d_a0 / D0 - 1
    rounds = []
    d_a = d_a0
    for i in range(count):
        w_i = w0 * (1 - eps / 2) ** i
        D_i = d_a / (1 + excess0 * (1 + eps / 2) ** i)
        if D_i < 1:
            break
        rounds.append(NibbleParams(D_i, eps, w_i, gamma, d_a))
        d_a = d_a * math.exp(-eps * (r - 1 + w_i + gamma))
    return NibbleSchedule(rounds, count, mode, float(D0), exponent, r, g, float(T), overrides)


# -- drivers ---------------------------------------------------------------------------

def _girth_flag(H: ConfigHypergraph) -> None:
    if H.num_configs and H.num_configs <= 20000:
        found = girth(H, cap=4)
        if found is not None and found[0] < 5:
            level = logging.WARNING if found[0] < 3 else logging.INFO
            log.log(level, "configuration hypergraph has a %d-cycle; round guarantees still hold", found[0])


def _drive(G, H, schedule, seed, round_fn, stop_when_a_empty=False, on_round=None):
    _check_round_inputs(G, H)
    _girth_flag(H)
    alive = np.ones(G.num_vertices, dtype=bool)
    origin = np.arange(G.num_edges)
    matched: list[np.ndarray] = []
    trace: list[dict] = []
    cur_g, cur_h = G, H
    for i, params in enumerate(schedule.rounds):
        if cur_g.num_edges == 0:
            break
        if stop_when_a_empty and not (alive & cur_g.in_a).any():
            break
        out = round_fn(cur_g, cur_h, params, seed, round_index=i, alive=alive)
        matched.append(origin[out.committed])
        origin = origin[out.kept]
        cur_g, cur_h, alive = out.residual_g, out.residual_h, out.alive
        trace.append(out.stats)
        if on_round is not None:
            on_round(out.stats)
        if out.stats["predicted_D"] < 1:
            break
    edges = frozenset(int(e) for part in matched for e in part)
    return edges, trace, cur_g, cur_h, alive, origin


def run_nibble(G: Hypergraph, H: ConfigHypergraph, schedule: NibbleSchedule, seed: int, *,
               on_round: Callable[[dict], None] | None = None) -> MatchingResult:
    """Iterate plain rounds; the union of committed edges is returned with the per-round trace."""
    if schedule.mode != "plain":
        raise ValueError("run_nibble needs a plain schedule")
    edges, trace, *_ = _drive(G, H, schedule, seed, nibble_round, on_round=on_round)
    _assert_valid(G, H, edges, a_perfect=False)
    return MatchingResult(edges, trace)


def run_bipartite(G: Hypergraph, H: ConfigHypergraph, schedule: NibbleSchedule, seed: int,
                  finisher: Callable | None = None, *, budget: int | None = None,
                  on_round: Callable[[dict], None] | None = None) -> MatchingResult:
    """Bipartite rounds, then the finisher on whatever A-vertices remain."""
    if schedule.mode != "bipartite":
        raise ValueError("run_bipartite needs a bipartite schedule")
    if not G.is_bipartite:
        raise ValueError("run_bipartite needs a bipartite hypergraph")
    if finisher is None:
        from .finish import finish_matching as finisher
    edges, trace, cur_g, cur_h, alive, origin = _drive(
        G, H, schedule, seed, bipartite_round, stop_when_a_empty=True, on_round=on_round)
    left_a = np.flatnonzero(alive & G.in_a)
    if len(left_a) == 0:
        _assert_valid(G, H, edges, a_perfect=True)
        return MatchingResult(edges, trace, True, "A exhausted by the nibble")

    rest = np.ones(G.num_vertices, dtype=bool)
    rest[left_a] = False
    sub_g = cur_g.with_bipartition(left_a, np.flatnonzero(rest))
    stranded = [int(a) for a in left_a if len(sub_g.edges_at(int(a))) == 0]
    if stranded:
        _assert_valid(G, H, edges, a_perfect=False)
        return MatchingResult(edges, trace, False, f"A-vertices left without edges: {stranded[:5]}",
                              {"stranded": stranded})
    outcome = finisher(sub_g, cur_h, seed, budget=budget)
    info = outcome.to_dict()
    if not outcome.success:
        partial = edges | frozenset(int(origin[e]) for e in outcome.partial_matching())
        _assert_valid(G, H, partial, a_perfect=False)
        return MatchingResult(partial, trace, False, "finisher exhausted its budget", info)
    final = edges | frozenset(int(origin[e]) for e in outcome.matching)
    _assert_valid(G, H, final, a_perfect=True)
    return MatchingResult(final, trace, True, "finished", info)


def _assert_valid(G, H, edges, a_perfect: bool) -> None:
    ok, pair = is_matching(G, edges)
    if not ok:
        raise AssertionError(f"output is not a matching: {pair}")
    ok, cfg = is_h_avoiding(H, edges)
    if not ok:
        raise AssertionError(f"output spans configuration {cfg}")
    if a_perfect:
        covered = np.zeros(G.num_vertices, dtype=bool)
        for e in edges:
            covered[list(G.edge(e))] = True
        if not covered[G.in_a].all():
            raise AssertionError("output is not A-perfect")


# -- reporting ----------------------------------------------------------------------

def diagnostics(trace: list[dict]) -> dict:
    """Observed against predicted quantities for every round of a trace."""
    if not trace:
        raise ValueError("empty trace")
    rows = []
    for s in trace:
        row = {
            "round": s["round"],
            "mean_degree": s["mean_degree_after"],
            "predicted_D": s["predicted_D"],
            "degree_ratio": s["mean_degree_after"] / s["predicted_D"] if s["predicted_D"] else None,
            "max_weighted_degree": s["max_weighted_degree_after"],
            "predicted_w": s["predicted_w"],
            "matched_fraction": s["matched_fraction"],
            "predicted_matched_fraction": s["predicted_matched_fraction"],
            "clamped": s["clamped"],
        }
        if "D_A_target" in s:
            row.update(A_floor=s.get("A_floor_after"), D_A_target=s["D_A_target"],
                       B_ceiling=s.get("B_ceiling_after"), D_target=s["D_target"])
        rows.append(row)
    return {
        "rounds": len(trace),
        "total_committed": int(sum(s["committed"] for s in trace)),
        "total_clamped": int(sum(s["clamped"] for s in trace)),
        "per_round": rows,
    }


def dump_trace_jsonl(trace: Iterable[dict], fh) -> None:
    for s in trace:
        fh.write(json.dumps(s, sort_keys=True) + "\n")


def load_trace_jsonl(fh) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]
