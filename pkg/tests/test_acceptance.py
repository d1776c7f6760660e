"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section at the end of the terminal output.
"""
import itertools
import json
import math
import time

import numpy as np
import pytest

from avoidmatch.designs import (EdgeColoring, ListAssignment, SteinerHost, SteinerOracle, build_rainbow,
                                decode_disjoint, decode_list, encode_disjoint, encode_list, lift_disjoint,
                                lift_list)
from avoidmatch.finish import check_hypotheses, finish_matching
from avoidmatch.hypercore import (ConfigHypergraph, Hypergraph, cross_i_codegree, girth, is_h_avoiding, is_matching,
                                  kl_codegree_max, max_weighted_degree)
from avoidmatch.nibble import NibbleParams, nibble_round, removal_mask
from avoidmatch.pipeline import PipelineConfig, StageError, run_pipeline
from avoidmatch.sparsify import sparsify
from avoidmatch.verify import (girth_oracle_naive, verify_matching_output, verify_no_configurations,
                               verify_partial_design)

from conftest import random_bipartite
import oracles


# -- 1: structural soundness ----------------------------------------------------------------

def _random_files_instance(rng, tmp_path, tag):
    k = int(rng.integers(2, 4))
    n = int(rng.integers(8, 30))
    m = int(rng.integers(5, 60))
    G = Hypergraph(n, [sorted(rng.choice(n, k, replace=False).tolist()) for _ in range(m)])
    raw = oracles.random_config_hypergraph(rng, m, int(rng.integers(0, 3 * m)), 3)
    H = ConfigHypergraph(m, [c for c in raw if is_matching(G, c)[0]], G)
    return _dump(tmp_path, tag, G, H)


def _random_bipartite_instance(rng, tmp_path, tag):
    r = int(rng.integers(2, 4))
    D = int(rng.integers(2, 5))
    G, H = random_bipartite(rng, int(rng.integers(1, 6)), r, D, 8 * r * D, n_configs=int(rng.integers(0, 6)))
    return _dump(tmp_path, tag, G, H)


def _dump(tmp_path, tag, G, H):
    gp, hp = tmp_path / f"{tag}-G.json", tmp_path / f"{tag}-H.json"
    gp.write_text(json.dumps(G.to_dict()))
    hp.write_text(json.dumps(H.to_dict()))
    return {"kind": "files", "G": str(gp), "H": str(hp)}, G, H


def _run_family(i, rng, tmp_path):
    family = i % 4
    seed = int(rng.integers(2**32))
    if family == 0:
        inst = {"kind": "steiner", "n": int(rng.integers(7, 31)), "q": 3, "r": 2, "g": int(rng.choice([2, 3, 4]))}
        return run_pipeline(PipelineConfig(inst, seed=seed, verify=False)), None, None, False
    if family == 1:
        inst = {"kind": "partite", "n": int(rng.integers(3, 8)), "q": 3, "r": 2, "g": int(rng.choice([2, 4]))}
        return run_pipeline(PipelineConfig(inst, seed=seed, verify=False)), None, None, False
    if family == 2:
        inst, G, H = _random_files_instance(rng, tmp_path, i)
        cfg = PipelineConfig(inst, seed=seed, sparsify=bool(rng.integers(2)), sparsify_p=0.5, verify=False)
        return run_pipeline(cfg), G, H, False
    inst, G, H = _random_bipartite_instance(rng, tmp_path, i)
    return run_pipeline(PipelineConfig(inst, seed=seed, alpha=0.05, verify=False)), G, H, True


def test_criterion_01_structural_soundness(acceptance, tmp_path):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    runs, failures, no_output = 1000, [], 0
    for i in range(runs):
        try:
            res, G, H, a_perfect = _run_family(i, rng, tmp_path)
        except StageError:
            no_output += 1  # nothing emitted, so nothing to validate
            continue
        if res.design is not None:
            if not verify_partial_design(res.design).passed:
                failures.append(("design", i))
            if not verify_matching_output(res.G, None, res.matching, require_a_perfect=False).passed:
                failures.append(("host matching", i))
        else:
            if not verify_matching_output(G, H, res.matching, require_a_perfect=a_perfect).passed:
                failures.append(("matching", i))
    took = time.perf_counter() - start
    ok = not failures and took < 600
    acceptance(1, ok, f"{runs} runs, {len(failures)} failures, {no_output} without output, {took:.0f}s")
    assert not failures, failures[:5]
    assert took < 600


# -- 2: configuration-freeness ----------------------------------------------------------------

def test_criterion_02_configuration_free(acceptance):
    start = time.perf_counter()
    failures, blocks = [], {}
    for n in (20, 50, 100):
        counts = []
        for seed in range(20):
            res = run_pipeline(PipelineConfig({"kind": "steiner", "n": n, "q": 3, "r": 2, "g": 4}, seed=seed,
                                              verify=False))
            rep = verify_partial_design(res.design).merge(verify_no_configurations(res.design, 4))
            if not rep.passed:
                failures.append((n, seed))
            counts.append(len(res.design.blocks))
        blocks[n] = float(np.mean(counts))
    took = time.perf_counter() - start
    ok = not failures and took < 900
    acceptance(2, ok, f"60 designs, {len(failures)} failures, mean blocks {blocks}, {took:.0f}s")
    assert not failures, failures
    assert took < 900


# -- 3: sparsifier girth ----------------------------------------------------------------------

def test_criterion_03_sparsifier_girth(acceptance):
    start = time.perf_counter()
    host = SteinerHost(30, 3, 2)
    oracle = SteinerOracle(host, 4)
    bad = [seed for seed in range(100)
           if girth_oracle_naive(sparsify(host.G, oracle, 0.5, 4, seed).H, cap=4) is not None]
    took = time.perf_counter() - start
    ok = not bad and took < 300
    acceptance(3, ok, f"100 seeds, {len(bad)} with a cycle of length <= 4, {took:.0f}s")
    assert not bad, bad
    assert took < 300


# -- 4: exact removal rate ---------------------------------------------------------------------

def _linear_instance(rng):
    """200 edges of sizes 2 and 3; configurations are matchings sharing at most one edge pairwise."""
    n = 150
    G = Hypergraph(n, [sorted(rng.choice(n, int(rng.integers(2, 4)), replace=False).tolist()) for _ in range(200)])
    cfgs: list[list[int]] = []
    while len(cfgs) < 60:
        c = sorted(rng.choice(200, int(rng.integers(2, 4)), replace=False).tolist())
        if is_matching(G, c)[0] and all(len(set(c) & set(d)) <= 1 for d in cfgs):
            cfgs.append(c)
    return G, ConfigHypergraph(200, cfgs, G)


def test_criterion_04_exact_removal_rate(acceptance):
    start = time.perf_counter()
    G, H = _linear_instance(np.random.default_rng(4))
    D, eps = 4.0, 0.2
    # the maximum weighted degree bounds 1 - survival / eps for every edge, so no flip clamps
    params = NibbleParams(D=D, epsilon=eps, w=max_weighted_degree(H, D))
    samples = 100_000
    hits = np.zeros(G.num_edges)
    clamped = 0
    for s in range(samples):
        mask, c = removal_mask(G, H, params, seed=s)
        hits += mask
        clamped += c
    target = eps * params.w
    sigma = math.sqrt(samples * target * (1 - target))
    outside = int((np.abs(hits - samples * target) > 3 * sigma).sum())
    took = time.perf_counter() - start
    ok = clamped == 0 and outside <= 0.01 * G.num_edges and took < 300
    acceptance(4, ok, f"target {target:.4f}, mean rate {hits.mean() / samples:.4f}, "
                      f"{outside}/200 edges outside 3 sd, {clamped} clamps, {took:.0f}s")
    assert clamped == 0
    assert outside <= 2
    assert took < 300


# -- 5 and 6: one round on the sparsified (100,3,2) host -----------------------------------------

@pytest.fixture(scope="module")
def sparsified_100():
    host = SteinerHost(100, 3, 2)
    res = sparsify(host.G, SteinerOracle(host, 4), 0.5, 4, seed=2026)
    deg = res.G.degrees()
    alive = deg > 0
    D = float(deg[alive].mean())
    eps = 0.05
    params = NibbleParams(D=D, epsilon=eps, w=float(max_weighted_degree(res.H, D)))
    outcomes = [nibble_round(res.G, res.H, params, seed, alive=alive) for seed in range(50)]
    return params, outcomes, float(res.H.weighted_degrees(D).mean())


def test_criterion_05_degree_evolution(acceptance, sparsified_100):
    params, outcomes, _ = sparsified_100
    target = params.next_D(3)
    ratios = np.array([o.stats["mean_degree_after"] / target for o in outcomes])
    ok = bool(np.all(np.abs(ratios - 1) <= 0.10))
    acceptance(5, ok, f"D={params.D:.3f} w={params.w:.3f} D'={target:.3f}; observed/D' "
                      f"mean {ratios.mean():.3f}, range [{ratios.min():.3f}, {ratios.max():.3f}] over 50 seeds")
    assert ok


def test_criterion_06_weighted_degree_decay(acceptance, sparsified_100):
    params, outcomes, mean_before = sparsified_100
    bound = params.w * (1 - params.epsilon / 4)
    means = np.array([o.stats["mean_weighted_degree_after"] for o in outcomes])
    share = float(np.mean(means <= bound))
    ok = share >= 0.9
    acceptance(6, ok, f"w={params.w:.4f}, bound {bound:.4f}, mean before {mean_before:.4f}, mean after {means.mean():.4f}, "
                      f"{share:.0%} of seeds within bound")
    assert ok


# -- 7: finisher ------------------------------------------------------------------------------

def test_criterion_07_finisher(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    combos = list(itertools.product((5, 10, 20), (2, 3)))
    trials, wins, invalid, unmet = 1000, 0, 0, 0
    for seed in range(trials):
        D, r = combos[seed % len(combos)]
        G, H = random_bipartite(rng, 6, r, D, 8 * r * D, n_configs=12)
        hyp = check_hypotheses(G, H)
        if not (hyp["a_degree_ok"] and max_weighted_degree(H, D) <= 1):
            unmet += 1
        res = finish_matching(G, H, seed)
        if res.success:
            wins += 1
            if not verify_matching_output(G, H, sorted(res.matching)).passed:
                invalid += 1
    took = time.perf_counter() - start
    ok = unmet == 0 and wins >= 0.99 * trials and invalid == 0 and took < 300
    acceptance(7, ok, f"{wins}/{trials} succeeded, {invalid} invalid, {unmet} outside hypotheses, {took:.0f}s")
    assert unmet == 0
    assert wins >= 990 and invalid == 0
    assert took < 300


# -- 8: lift round trips ----------------------------------------------------------------------

def _valid_list_coloring(G, H, lists, coloring):
    if sorted(coloring) != list(range(G.num_edges)):
        return False
    if any(coloring[e] not in lists[e] for e in coloring):
        return False
    classes: dict[int, list[int]] = {}
    for e, c in coloring.items():
        classes.setdefault(c, []).append(e)
    return all(is_matching(G, M)[0] and is_h_avoiding(H, M)[0] for M in classes.values())


def _check_disjoint(rng):
    G, H = random_bipartite(rng, int(rng.integers(1, 4)), 2, 2, 3, n_configs=int(rng.integers(0, 3)))
    m = int(rng.integers(1, 3))
    L, HL = lift_disjoint(G, H, m)
    a_side = list(G.bipartition[0])
    lifted = oracles.a_perfect_solutions(L.edges, list(L.bipartition[0]), HL.configs, limit=1)
    direct = oracles.disjoint_solutions(G.edges, a_side, H.configs, m, limit=3)
    if bool(lifted) != bool(direct):
        return False
    for sol in lifted:
        decoded = decode_disjoint(G, m, sol)
        if len(decoded) != m or encode_disjoint(G, decoded) != sol:
            return False
        if any(M & N for M, N in itertools.combinations(decoded, 2)):
            return False
        if not all(verify_matching_output(G, H, sorted(M)).passed for M in decoded):
            return False
    return all(tuple(decode_disjoint(G, m, encode_disjoint(G, d))) == tuple(d) for d in direct)


def _check_list(rng):
    m = int(rng.integers(1, 7))
    G = Hypergraph(6, [sorted(rng.choice(6, 2, replace=False).tolist()) for _ in range(m)])
    cfgs = [c for c in oracles.random_config_hypergraph(rng, m, int(rng.integers(0, 3)), 3) if is_matching(G, c)[0]]
    H = ConfigHypergraph(m, cfgs, G)
    lists = ListAssignment(tuple(tuple(rng.choice(3, int(rng.integers(1, 4)), replace=False).tolist())
                                 for _ in range(m)))
    L, HL, labels = lift_list(G, H, lists)
    lifted = oracles.a_perfect_solutions(L.edges, list(L.bipartition[0]), HL.configs, limit=1)
    direct = oracles.list_colorings(G.edges, lists.lists, H.configs)
    if bool(lifted) != bool(direct):
        return False
    for sol in lifted:
        coloring = decode_list(labels, sol)
        if not _valid_list_coloring(G, H, lists.lists, coloring) or encode_list(labels, coloring) != sol:
            return False
    return all(decode_list(labels, encode_list(labels, c)) == c for c in direct[:3])


def test_criterion_08_lift_round_trips(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    bad_disjoint = sum(not _check_disjoint(rng) for _ in range(1000))
    bad_list = sum(not _check_list(rng) for _ in range(1000))
    took = time.perf_counter() - start
    ok = bad_disjoint == 0 and bad_list == 0 and took < 300
    acceptance(8, ok, f"disjoint lift {1000 - bad_disjoint}/1000, list lift {1000 - bad_list}/1000, {took:.0f}s")
    assert bad_disjoint == 0 and bad_list == 0
    assert took < 300


# -- 9: rainbow correspondence -------------------------------------------------------------------

def test_criterion_09_rainbow_bijection(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(9)
    mismatches = 0
    for _ in range(500):
        n = int(rng.integers(4, 10))
        k = int(rng.integers(2, 4))
        m = int(rng.integers(0, 13))
        G = Hypergraph(n, [sorted(rng.choice(n, k, replace=False).tolist()) for _ in range(m)])
        colors = tuple(int(c) for c in rng.integers(0, 4, m))
        R = build_rainbow(G, EdgeColoring(colors, 4))
        if oracles.matchings_bruteforce(R.edges) != oracles.rainbow_matchings_bruteforce(G.edges, colors):
            mismatches += 1
    took = time.perf_counter() - start
    ok = mismatches == 0 and took < 120
    acceptance(9, ok, f"500 colored graphs, {mismatches} mismatches, {took:.0f}s")
    assert mismatches == 0
    assert took < 120


# -- 10: oracle agreement --------------------------------------------------------------------------

def test_criterion_10_oracle_agreement(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(10)
    girth_bad = 0
    for _ in range(200):
        m = int(rng.integers(3, 13))
        H = ConfigHypergraph(m, oracles.random_config_hypergraph(rng, m, int(rng.integers(0, 9)), 3))
        found = girth(H, cap=4)
        girth_bad += (found[0] if found else None) != girth_oracle_naive(H, cap=4)
    codeg_bad = 0
    for _ in range(200):
        H = ConfigHypergraph(15, oracles.random_config_hypergraph(rng, 15, int(rng.integers(0, 40)), max_size=5))
        k = int(rng.integers(3, 6))
        l = int(rng.integers(2, k))
        codeg_bad += kl_codegree_max(H, k, l) != oracles.kl_codegree_naive(H, k, l)
        G = Hypergraph(12, [sorted(rng.choice(12, 2, replace=False).tolist()) for _ in range(15)])
        e = int(rng.integers(15))
        v = int(rng.choice([x for x in range(12) if x not in G.edge(e)]))
        i = int(rng.integers(2, 6))
        codeg_bad += cross_i_codegree(G, H, v, e, i) != oracles.cross_codegree_naive(G, H, v, e, i)
    took = time.perf_counter() - start
    ok = girth_bad == 0 and codeg_bad == 0 and took < 120
    acceptance(10, ok, f"girth {200 - girth_bad}/200, codegrees {400 - codeg_bad}/400 agree, {took:.0f}s")
    assert girth_bad == 0 and codeg_bad == 0
    assert took < 120


# -- 11: coverage sanity (soft) ------------------------------------------------------------------

def test_criterion_11_coverage(acceptance):
    start = time.perf_counter()
    res = run_pipeline(PipelineConfig({"kind": "steiner", "n": 200, "q": 3, "r": 2, "g": 4}, seed=0))
    coverage = res.reports["coverage"]["fraction_of_target"]
    pairs = res.verification.covered_fraction
    took = time.perf_counter() - start
    ok = res.status == 0 and coverage >= 0.5 and took < 600
    acceptance(11, ok, f"{len(res.matching)} blocks, {coverage:.3f} of C(200,2)/3, covered pairs {pairs:.3f} "
                       f"(regression gate 0.5; not an asymptotic guarantee), {took:.0f}s")
    assert res.status == 0
    assert coverage >= 0.5
