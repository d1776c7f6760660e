"""End-to-end runs: build or load an instance, sparsify, nibble, finish or complete, verify."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .designs import (DesignInstance, ExplicitOracle, PartiteHost, SteinerHost, SteinerOracle,
                      greedy_complete)
from .hypercore import ConfigHypergraph, Hypergraph, max_weighted_degree
from .nibble import diagnostics, make_schedule, run_bipartite, run_nibble
from .rng import uniforms
from .sparsify import sparsify
from .verify import (VerificationReport, verify_matching_output, verify_no_configurations,
                     verify_partial_design)

__all__ = ["ConfigError", "StageError", "PipelineConfig", "PipelineResult", "run_pipeline",
           "config_hash", "dumps_output", "DESK_DEFAULTS"]

log = logging.getLogger(__name__)

# Schedule overrides used when the caller gives none: the formulas' epsilon is
# close to 1 at desk-scale degrees, so a small bite and a fixed round count are used.
DESK_DEFAULTS = {"epsilon": 0.25, "rounds": 25}


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    instance: dict
    seed: int = 0
    beta: float = 0.5
    alpha: float | None = None
    sparsify: bool = True
    sparsify_p: float | None = None
    schedule_overrides: dict | None = None
    complete: str = "greedy"
    finish: bool = True
    finish_budget: int | None = None
    verify: bool = True
    threads: int = 1

    _KINDS = ("steiner", "partite", "files")

    def __post_init__(self):
        inst = dict(self.instance)
        kind = inst.get("kind")
        if kind not in self._KINDS:
            raise ConfigError(f"instance.kind must be one of {self._KINDS}")
        if kind in ("steiner", "partite"):
            for key in ("n", "q", "r", "g"):
                if key not in inst:
                    raise ConfigError(f"instance.{key} is required")
            if not inst["q"] > inst["r"] >= 2:
                raise ConfigError("need q > r >= 2")
            if inst["g"] < 2:
                raise ConfigError("need g >= 2")
        else:
            if "G" not in inst:
                raise ConfigError("instance.G (path) is required for file instances")
        if not 0 < self.beta < 1:
            raise ConfigError("beta must lie in (0, 1)")
        if self.complete not in ("greedy", "none"):
            raise ConfigError("complete must be 'greedy' or 'none'")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        self.instance = inst

    def to_dict(self) -> dict:
        return {
            "instance": self.instance, "seed": self.seed, "beta": self.beta, "alpha": self.alpha,
            "sparsify": self.sparsify, "sparsify_p": self.sparsify_p,
            "schedule_overrides": self.schedule_overrides, "complete": self.complete,
            "finish": self.finish, "finish_budget": self.finish_budget, "verify": self.verify,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__ and not k.startswith("_")}
        unknown = set(data) - set(known) - {"meta", "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "instance" not in known:
            raise ConfigError("config needs an 'instance' table")
        return cls(**known)


def config_hash(config: PipelineConfig) -> str:
    blob = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def meta_block(config: PipelineConfig) -> dict:
    return {"seed": config.seed, "config_hash": config_hash(config), "version": __version__,
            "config": config.to_dict()}


def dumps_output(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True) + "\n"


@dataclass
class PipelineResult:
    config: PipelineConfig
    matching: list[int]
    design: DesignInstance | None
    trace: list[dict]
    reports: dict[str, Any]
    verification: VerificationReport | None
    status: int = 0
    G: Hypergraph | None = field(default=None, repr=False)
    H: ConfigHypergraph | None = field(default=None, repr=False)

    def outputs(self) -> dict[str, str]:
        """File name to file content; every JSON file carries the meta block."""
        meta = meta_block(self.config)
        files = {
            "matching.json": dumps_output({"meta": meta, "edges": self.matching}),
            "report.json": dumps_output({
                "meta": meta, "stages": self.reports,
                "verification": self.verification.to_dict() if self.verification else None,
            }),
            "trace.jsonl": "".join(json.dumps({"meta_hash": meta["config_hash"], **s}, sort_keys=True) + "\n"
                                   for s in self.trace),
        }
        if self.design is not None:
            d = self.design.to_dict()
            d["provenance"] = meta
            files["design.json"] = dumps_output(d)
        return files

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in self.outputs().items():
            path = out / name
            path.write_text(text)
            written.append(path)
        return written


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ConfigError, StageError):
        raise
    except Exception as exc:  # noqa: BLE001 - re-raised with the stage tag
        raise StageError(name, f"{type(exc).__name__}: {exc}") from exc


def _schedule_for(G: Hypergraph, H: ConfigHypergraph, exponent: float, g: int, mode: str, overrides: dict | None):
    """Schedule anchored at the sparsified host's degree scale, with desk-scale defaults."""
    deg = G.degrees()
    carrying = deg[deg > 0]
    D0 = max(2.0, float(carrying.max()) if carrying.size else 2.0)
    r = G.rank if G.num_edges else 2
    ov = dict(DESK_DEFAULTS if overrides is None else overrides)
    if overrides is None or "w0" not in ov:
        w = float(max_weighted_degree(H, D0)) if H.num_configs else 0.0
        ov.setdefault("w0", w)
        if w > 0 and ov.get("epsilon", 1.0) * w > 1:
            ov["epsilon"] = 0.9 / w
    return make_schedule(D0, exponent, r, g, mode, ov)


def _load_files(inst: dict) -> tuple[Hypergraph, ConfigHypergraph]:
    G = Hypergraph.from_dict(json.loads(Path(inst["G"]).read_text()))
    if inst.get("H"):
        H = ConfigHypergraph.from_dict(json.loads(Path(inst["H"]).read_text()), G.num_edges)
    else:
        H = ConfigHypergraph(G.num_edges)
    return G, H


def run_pipeline(config: PipelineConfig, on_round=None) -> PipelineResult:
    """Run every stage named in ``config``; ``status`` is 0 on success and 1 on a failed verification."""
    inst = config.instance
    reports: dict[str, Any] = {}
    if inst["kind"] in ("steiner", "partite"):
        return _run_design(config, reports, on_round)
    return _run_files(config, reports, on_round)


def _run_design(config: PipelineConfig, reports: dict, on_round) -> PipelineResult:
    inst = config.instance
    n, q, r, g = inst["n"], inst["q"], inst["r"], inst["g"]
    host = _stage("build", SteinerHost if inst["kind"] == "steiner" else PartiteHost, n, q, r)
    oracle = SteinerOracle(host, max(g, 2)) if g >= 3 else None
    G = host.G
    reports["build"] = {"vertices": G.num_vertices, "edges": G.num_edges, "kind": inst["kind"]}

    if config.sparsify and oracle is not None:
        res = _stage("sparsify", sparsify, G, oracle, config.beta, g, config.seed, p=config.sparsify_p)
        Gs, Hs, kept = res.G, res.H, res.kept
        reports["sparsify"] = res.report.to_dict()
    else:
        ids = np.arange(G.num_edges)
        Gs, kept = G, ids
        Hs = oracle.restricted(ids) if oracle is not None else ConfigHypergraph(G.num_edges)

    trace: list[dict] = []
    local: frozenset[int] = frozenset()
    if Gs.num_edges:
        sched = _stage("schedule", _schedule_for, Gs, Hs, config.beta, g, "plain", config.schedule_overrides)
        reports["schedule"] = {k: v for k, v in sched.to_dict().items() if k != "rounds"}
        out = _stage("nibble", run_nibble, Gs, Hs, sched, config.seed, on_round=on_round)
        local, trace = out.edges, out.trace
        if trace:
            reports["nibble"] = diagnostics(trace)
    matched = sorted(int(kept[e]) for e in local)
    reports["nibble_blocks"] = len(matched)

    if config.complete == "greedy":
        order = np.argsort(uniforms(config.seed, 0, "complete-order", G.num_edges), kind="stable")
        taken = np.zeros(G.num_edges, dtype=bool)
        taken[matched] = True
        order = order[~taken[order]]
        extra = _stage("complete", greedy_complete, host.blocks[matched].tolist(), host.blocks, q, r, g, order)
        matched = sorted(matched + extra)
        reports["complete"] = {"added_blocks": len(extra)}

    blocks = tuple(tuple(int(x) for x in host.blocks[e]) for e in matched)
    points = q * n if inst["kind"] == "partite" else n
    design = DesignInstance(points, q, r, g, blocks)
    total = math.comb(points, r) / math.comb(q, r)
    reports["coverage"] = {"blocks": len(blocks), "target_blocks": total,
                           "fraction_of_target": len(blocks) / total if total else 0.0}

    verification = None
    status = 0
    if config.verify:
        verification = _stage("verify", _verify_design, G, design, matched)
        status = 0 if verification.passed else 1
    return PipelineResult(config, matched, design, trace, reports, verification, status, G, None)


def _verify_design(G: Hypergraph, design: DesignInstance, matched: list[int]) -> VerificationReport:
    report = verify_matching_output(G, None, matched, require_a_perfect=False)
    report = report.merge(verify_partial_design(design))
    if design.g >= 2:
        report = report.merge(verify_no_configurations(design, design.g))
    pd = verify_partial_design(design)
    report.covered_fraction = pd.covered_fraction
    return report


def _run_files(config: PipelineConfig, reports: dict, on_round) -> PipelineResult:
    G, H = _stage("load", _load_files, config.instance)
    bipartite = G.is_bipartite and config.alpha is not None
    # sampling at p << 1 would strand A-vertices, so A-perfect runs use H as given
    if config.sparsify and bipartite:
        reports["sparsify"] = {"skipped": "bipartite run needs every A-vertex"}
    if config.sparsify and not bipartite:
        res = _stage("sparsify", sparsify, G, ExplicitOracle(H), config.beta, max(H.max_size, 2), config.seed,
                     p=config.sparsify_p)
        Gs, Hs, kept = res.G, res.H, res.kept
        reports["sparsify"] = res.report.to_dict()
    else:
        Gs, Hs, kept = G, H, np.arange(G.num_edges)

    trace: list[dict] = []
    success = True
    if bipartite:
        sched = _stage("schedule", _schedule_for, Gs, Hs, config.alpha, max(H.max_size, 2), "bipartite",
                       config.schedule_overrides)
        reports["schedule"] = {k: v for k, v in sched.to_dict().items() if k != "rounds"}
        finisher = None if config.finish else _no_finisher
        try:
            out = run_bipartite(Gs, Hs, sched, config.seed, finisher, budget=config.finish_budget,
                                on_round=on_round)
        except ValueError as exc:
            raise StageError("finish", str(exc)) from exc
        success = out.success
        reports["finish"] = out.finisher
        if not success:
            raise StageError("finish", out.message)
    elif Gs.num_edges:
        sched = _stage("schedule", _schedule_for, Gs, Hs, config.beta, max(H.max_size, 2), "plain",
                       config.schedule_overrides)
        reports["schedule"] = {k: v for k, v in sched.to_dict().items() if k != "rounds"}
        out = _stage("nibble", run_nibble, Gs, Hs, sched, config.seed, on_round=on_round)
    else:
        out = None
    local = out.edges if out is not None else frozenset()
    trace = out.trace if out is not None else []
    if trace:
        reports["nibble"] = diagnostics(trace)
    matched = sorted(int(kept[e]) for e in local)

    verification = None
    status = 0
    if config.verify:
        verification = _stage("verify", verify_matching_output, G, H, matched, require_a_perfect=bipartite)
        status = 0 if verification.passed else 1
    return PipelineResult(config, matched, None, trace, reports, verification, status, G, H)


def _no_finisher(G, H, seed, budget=None):
    raise ValueError("A-vertices remain after the nibble and finishing is disabled")
