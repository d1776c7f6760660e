"""Command-line entry point (``avoidmatch``).

Exit status: 0 success, 1 verification failure, 2 usage or configuration
error, 3 failure inside a pipeline stage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .designs import (ConfigGuardError, DesignInstance, EdgeColoring, ExplicitOracle, ListAssignment,
                      RegularizeGuardError, SteinerHost, SteinerOracle, build_partite_aux, build_rainbow,
                      build_steiner_aux, lift_disjoint, lift_list, regularize)
from .finish import finish_matching
from .hypercore import ConfigHypergraph, Hypergraph, canonical_form
from .nibble import NibbleSchedule, diagnostics, load_trace_jsonl, make_schedule, run_bipartite, run_nibble
from .pipeline import ConfigError, PipelineConfig, StageError, config_hash, run_pipeline
from .sparsify import sparsify
from .verify import GuardExceeded, verify_matching_output, verify_no_configurations, verify_partial_design

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("avoidmatch")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_STAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- file helpers ------------------------------------------------------------------

def _read_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _read_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    text = p.read_text()
    if p.suffix == ".toml":
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"{path} is not valid TOML: {exc}") from exc
    return _read_json(path)


def _load_G(path: str) -> Hypergraph:
    try:
        return Hypergraph.from_dict(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed hypergraph ({exc})") from exc


def _load_H(path: str | None, G: Hypergraph) -> ConfigHypergraph:
    if path is None:
        return ConfigHypergraph(G.num_edges)
    try:
        return ConfigHypergraph.from_dict(_read_json(path), G.num_edges)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed configuration hypergraph ({exc})") from exc


def _meta(args, extra: dict | None = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "log_level", "threads")}
    blob = json.dumps(params, sort_keys=True, default=str)
    import hashlib
    out = {"seed": getattr(args, "seed", None), "version": __version__,
           "config_hash": hashlib.sha256(blob.encode()).hexdigest()[:16], "command": args.command,
           "params": json.loads(blob)}
    if extra:
        out.update(extra)
    return out


def _write(out_dir: str | None, name: str, payload, meta: dict | None = None) -> None:
    if isinstance(payload, dict) and meta is not None:
        payload = {"meta": meta, **payload}
    text = json.dumps(payload, sort_keys=True) + "\n"
    if out_dir is None:
        sys.stdout.write(text)
        return
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


def _write_pair(out: str | None, G: Hypergraph, H: ConfigHypergraph | None, meta: dict) -> None:
    g_dict, h_dict = canonical_form(G, H)
    _write(out, "G.json", g_dict, meta)
    if h_dict is not None:
        _write(out, "H.json", h_dict, meta)


# -- subcommands ---------------------------------------------------------------------

def cmd_build(args) -> int:
    builder = build_steiner_aux if args.command == "build-steiner" else build_partite_aux
    try:
        G, H = builder(args.n, args.q, args.r, args.g, max_configs=args.max_configs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    meta = _meta(args)
    _write_pair(args.out, G, H, meta)
    deg = G.degrees()
    _write(args.out, "build.json", {"vertices": G.num_vertices, "edges": G.num_edges, "configs": H.num_configs,
                                    "min_degree": int(deg.min()), "max_degree": int(deg.max())}, meta)
    return EXIT_OK


def cmd_build_rainbow(args) -> int:
    G = _load_G(args.graph)
    coloring = EdgeColoring.from_dict(_read_json(args.coloring))
    try:
        R = build_rainbow(G, coloring)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_pair(args.out, R, None, _meta(args))
    return EXIT_OK


def cmd_lift_disjoint(args) -> int:
    G = _load_G(args.G)
    H = _load_H(args.H, G)
    try:
        L, HL = lift_disjoint(G, H, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_pair(args.out, L, HL, _meta(args))
    return EXIT_OK


def cmd_lift_list(args) -> int:
    G = _load_G(args.G)
    H = _load_H(args.H, G)
    lists = ListAssignment.from_dict(_read_json(args.lists))
    try:
        L, HL, labels = lift_list(G, H, lists)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    meta = _meta(args)
    _write_pair(args.out, L, HL, meta)
    _write(args.out, "labels.json", {"labels": [list(x) for x in labels]}, meta)
    return EXIT_OK


def cmd_regularize(args) -> int:
    G = _load_G(args.G)
    try:
        R = regularize(G, args.DA, args.DB, max_edges=args.max_edges)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_pair(args.out, R, None, _meta(args))
    return EXIT_OK


def cmd_sparsify(args) -> int:
    if args.steiner:
        n, q, r = args.steiner
        host = SteinerHost(n, q, r)
        G, oracle = host.G, SteinerOracle(host, args.g)
    elif args.G:
        G = _load_G(args.G)
        oracle = ExplicitOracle(_load_H(args.H, G))
    else:
        raise UsageError("sparsify needs --G or --steiner N Q R")
    if not 0 < args.beta < 1:
        raise UsageError("--beta must lie in (0, 1)")
    res = sparsify(G, oracle, args.beta, args.g, args.seed, D=args.D, p=args.p)
    meta = _meta(args)
    _write_pair(args.out, res.G, res.H, meta)
    _write(args.out, "sparsify.json", {"report": res.report.to_dict(), "kept": res.kept.tolist()}, meta)
    return EXIT_OK


def _schedule_from_args(args, G: Hypergraph, mode: str) -> NibbleSchedule:
    if args.schedule:
        data = _read_config(args.schedule)
        return NibbleSchedule.from_dict(data)
    overrides = json.loads(args.overrides) if args.overrides else {}
    deg = G.degrees()
    D0 = args.D0 if args.D0 else max(2.0, float(deg.max()) if deg.size else 2.0)
    exponent = args.beta if mode == "plain" else args.alpha
    r = G.rank if G.num_edges else 2
    return make_schedule(D0, exponent, r, args.g, mode, overrides)


def cmd_nibble(args) -> int:
    G = _load_G(args.G)
    H = _load_H(args.H, G)
    mode = "bipartite" if args.alpha is not None else "plain"
    try:
        sched = _schedule_from_args(args, G, mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    trace_path = Path(args.out) / "trace.jsonl" if args.out else None
    fh = None
    if trace_path is not None:
        trace_path.parent.mkdir(parents=True, exist_ok=True)
        fh = trace_path.open("w")

    def stream(stats):
        if fh is not None:
            fh.write(json.dumps(stats, sort_keys=True) + "\n")
            fh.flush()

    try:
        if sched.mode == "plain":
            res = run_nibble(G, H, sched, args.seed, on_round=stream)
        else:
            res = run_bipartite(G, H, sched, args.seed, budget=args.budget, on_round=stream)
    finally:
        if fh is not None:
            fh.close()
    meta = _meta(args)
    _write(args.out, "matching.json", {**res.to_dict(), "schedule": sched.to_dict()}, meta)
    return EXIT_OK if res.success else EXIT_STAGE


def cmd_finish(args) -> int:
    G = _load_G(args.G)
    H = _load_H(args.H, G)
    if not G.is_bipartite:
        raise UsageError("finish needs a bipartite hypergraph")
    try:
        res = finish_matching(G, H, args.seed, budget=args.budget)
    except ValueError as exc:
        raise StageError("finish", str(exc)) from exc
    payload = res.to_dict()
    if res.success:
        payload["edges"] = sorted(res.matching)
    _write(args.out, "finish.json", payload, _meta(args))
    return EXIT_OK if res.success else EXIT_STAGE


def _pipeline_config(args) -> PipelineConfig:
    data = _read_config(args.config) if args.config else {}
    data = dict(data)
    inst = dict(data.get("instance", {}))
    for key in ("n", "q", "r", "g"):
        val = getattr(args, key)
        if val is not None:
            inst[key] = val
    if args.kind:
        inst["kind"] = args.kind
    if args.G:
        inst.update(kind="files", G=args.G)
        if args.H:
            inst["H"] = args.H
    inst.setdefault("kind", "steiner")
    data["instance"] = inst
    for key in ("seed", "beta", "alpha", "sparsify_p", "finish_budget"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    if args.no_sparsify:
        data["sparsify"] = False
    if args.complete:
        data["complete"] = args.complete
    if args.no_verify:
        data["verify"] = False
    if args.overrides:
        data["schedule_overrides"] = json.loads(args.overrides)
    data["threads"] = args.threads
    return PipelineConfig.from_dict(data)


def cmd_pipeline(args) -> int:
    config = _pipeline_config(args)
    result = run_pipeline(config)
    if args.corrupt:
        _inject_fault(result)
    if args.out:
        result.write(args.out)
    summary = {"status": result.status, "config_hash": config_hash(config), "seed": config.seed,
               "blocks": len(result.matching), "coverage": result.reports.get("coverage"),
               "verified": result.verification.passed if result.verification else None}
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_VERIFY if result.status else EXIT_OK


def _inject_fault(result) -> None:
    """Test hook: duplicate a block so verification must fail."""
    if result.design is None or not result.design.blocks:
        return
    d = result.design
    b = d.blocks[0]
    other = next(x for x in range(d.n) if x not in b)
    bad = (b[0], b[1], other) + b[3:]
    result.design = DesignInstance(d.n, d.q, d.r, d.g, d.blocks + (tuple(sorted(bad[: d.q])),), d.provenance)
    report = verify_partial_design(result.design).merge(verify_no_configurations(result.design, result.design.g))
    result.verification = report
    result.status = 0 if report.passed else 1


def cmd_verify(args) -> int:
    if args.design:
        data = _read_json(args.design)
        try:
            S = DesignInstance.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"{args.design}: malformed design ({exc})") from exc
        report = verify_partial_design(S)
        g = args.g if args.g is not None else S.g
        if g >= 2:
            report = report.merge(verify_no_configurations(S, g))
    elif args.G:
        G = _load_G(args.G)
        H = _load_H(args.H, G)
        if not args.matching:
            raise UsageError("verify --G needs --matching")
        data = _read_json(args.matching)
        edges = data["edges"] if isinstance(data, dict) else data
        try:
            report = verify_matching_output(G, H, edges)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("verify needs --design or --G")
    _write(args.out, "verification.json", report.to_dict())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_diagnose(args) -> int:
    p = Path(args.trace)
    if not p.is_file():
        raise UsageError(f"no such file: {args.trace}")
    with p.open() as fh:
        trace = load_trace_jsonl(fh)
    if not trace:
        raise UsageError("trace is empty")
    _write(args.out, "diagnostics.json", diagnostics(trace))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avoidmatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--log-level", default="WARNING")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap; results do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_opt(p):
        p.add_argument("-o", "--out", help="output directory (stdout when omitted)")

    for name in ("build-steiner", "build-partite"):
        p = sub.add_parser(name, help=f"auxiliary (G, H) for {name.split('-')[1]} systems")
        for key in ("n", "q", "r", "g"):
            p.add_argument(f"--{key}", type=int, required=True)
        p.add_argument("--max-configs", type=float, default=1e8)
        out_opt(p)
        p.set_defaults(func=cmd_build)

    p = sub.add_parser("build-rainbow", help="rainbow hypergraph of an edge-colored hypergraph")
    p.add_argument("--graph", required=True)
    p.add_argument("--coloring", required=True)
    out_opt(p)
    p.set_defaults(func=cmd_build_rainbow)

    p = sub.add_parser("lift-disjoint", help="lift for m disjoint A-perfect matchings")
    p.add_argument("--G", required=True)
    p.add_argument("--H")
    p.add_argument("--m", type=int, required=True)
    out_opt(p)
    p.set_defaults(func=cmd_lift_disjoint)

    p = sub.add_parser("lift-list", help="lift for list colorings")
    p.add_argument("--G", required=True)
    p.add_argument("--H")
    p.add_argument("--lists", required=True)
    out_opt(p)
    p.set_defaults(func=cmd_lift_list)

    p = sub.add_parser("regularize", help="embed into a (D_A, D_B)-regular bipartite hypergraph")
    p.add_argument("--G", required=True)
    p.add_argument("--DA", type=int, required=True)
    p.add_argument("--DB", type=int, required=True)
    p.add_argument("--max-edges", type=int, default=10**7)
    out_opt(p)
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("sparsify", help="random sparsification to girth five")
    p.add_argument("--G")
    p.add_argument("--H")
    p.add_argument("--steiner", type=int, nargs=3, metavar=("N", "Q", "R"))
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--D", type=float)
    p.add_argument("--p", type=float, help="sampling probability override")
    out_opt(p)
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("nibble", help="run the plain (--beta) or bipartite (--alpha) nibble")
    p.add_argument("--G", required=True)
    p.add_argument("--H")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--schedule", help="schedule file (JSON or TOML)")
    p.add_argument("--beta", type=float, default=0.05)
    p.add_argument("--alpha", type=float)
    p.add_argument("--D0", type=float)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--overrides", help='JSON object, e.g. \'{"epsilon": 0.1, "rounds": 20}\'')
    p.add_argument("--budget", type=int)
    out_opt(p)
    p.set_defaults(func=cmd_nibble)

    p = sub.add_parser("finish", help="Moser-Tardos completion of an A-perfect matching")
    p.add_argument("--G", required=True)
    p.add_argument("--H")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int)
    out_opt(p)
    p.set_defaults(func=cmd_finish)

    p = sub.add_parser("pipeline", help="sparsify, nibble, finish or complete, verify")
    p.add_argument("--config", help="TOML or JSON file; flags override it")
    p.add_argument("--kind", choices=("steiner", "partite"))
    for key in ("n", "q", "r", "g"):
        p.add_argument(f"--{key}", type=int)
    p.add_argument("--G")
    p.add_argument("--H")
    p.add_argument("--seed", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sparsify-p", type=float)
    p.add_argument("--finish-budget", type=int)
    p.add_argument("--no-sparsify", action="store_true")
    p.add_argument("--complete", choices=("greedy", "none"))
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--overrides", help="schedule overrides as a JSON object")
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    out_opt(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("verify", help="independent checks of a design or a matching")
    p.add_argument("--design")
    p.add_argument("--g", type=int)
    p.add_argument("--G")
    p.add_argument("--H")
    p.add_argument("--matching")
    out_opt(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagnose", help="observed vs predicted quantities of a trace")
    p.add_argument("--trace", required=True)
    out_opt(p)
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError, ConfigGuardError, RegularizeGuardError, GuardExceeded) as exc:
        print(f"avoidmatch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"avoidmatch: error: bad JSON argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"avoidmatch: stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
