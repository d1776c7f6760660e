"""Randomized invariants checked with hypothesis."""
import itertools
from math import comb

import numpy as np
from hypothesis import given, settings, strategies as st

from avoidmatch.combinatorics import rank, unrank
from avoidmatch.designs import (EdgeColoring, build_rainbow, decode_disjoint, decode_rainbow, encode_disjoint,
                                lift_disjoint)
from avoidmatch.finish import finish_matching
from avoidmatch.hypercore import ConfigHypergraph, Hypergraph, is_h_avoiding, is_matching
from avoidmatch.nibble import NibbleParams, nibble_round

from conftest import random_bipartite, random_graph
import oracles

SETTINGS = settings(max_examples=60, deadline=None)

config_lists = st.lists(st.lists(st.integers(0, 11), min_size=1, max_size=4), max_size=20)


@SETTINGS
@given(config_lists)
def test_normalized_configs_form_an_antichain(raw):
    H = ConfigHypergraph(12, raw)
    sets = [frozenset(c) for c in H.configs]
    assert all(len(c) >= 2 for c in sets)
    assert not any(a < b for a, b in itertools.permutations(sets, 2))
    assert list(H.configs) == sorted(H.configs)
    # every input set of size >= 2 still contains some kept configuration
    for c in raw:
        c = frozenset(c)
        if len(c) >= 2:
            assert any(k <= c for k in sets)


@SETTINGS
@given(config_lists)
def test_normalization_is_idempotent(raw):
    H = ConfigHypergraph(12, raw)
    assert ConfigHypergraph(12, H.configs).configs == H.configs


@SETTINGS
@given(st.integers(1, 6).flatmap(lambda k: st.sets(st.integers(0, 30), min_size=k, max_size=k)))
def test_rank_unrank_bijection(subset):
    ranked = rank(subset)
    assert 0 <= ranked < comb(31, len(subset))
    assert unrank(ranked, len(subset)) == tuple(sorted(subset))


@SETTINGS
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_round_output_is_an_avoiding_matching(seed, epsilon):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, 14, 30, k=3)
    raw = oracles.random_config_hypergraph(rng, G.num_edges, 30, 3)
    H = ConfigHypergraph(G.num_edges, [c for c in raw if is_matching(G, c)[0]], G)
    out = nibble_round(G, H, NibbleParams(D=4.0, epsilon=epsilon, w=0.0), seed)
    M = out.matching
    assert is_matching(G, M)[0]
    assert is_h_avoiding(H, M, G)[0]
    covered = {v for e in M for v in G.edge(e)}
    for new_id, old_id in enumerate(out.kept.tolist()):
        assert G.edge(old_id) == out.residual_g.edge(new_id)
        assert not covered & set(G.edge(old_id))


@SETTINGS
@given(st.integers(0, 2**32 - 1))
def test_finisher_success_means_valid(seed):
    rng = np.random.default_rng(seed)
    G, H = random_bipartite(rng, 5, 2, 3, 6, n_configs=5)
    res = finish_matching(G, H, seed, budget=2000)
    if res.success:
        M = res.matching
        assert is_matching(G, M)[0] and is_h_avoiding(H, M, G)[0]
        assert sorted(int(G.a_vertex_of_edges()[e]) for e in M) == sorted(G.bipartition[0])


@SETTINGS
@given(st.integers(0, 2**32 - 1))
def test_rainbow_decoding_preserves_matchings(seed):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, 8, 10)
    colors = rng.integers(0, 3, G.num_edges).tolist()
    R = build_rainbow(G, EdgeColoring(tuple(colors)))
    for size in range(1, 4):
        for M in itertools.combinations(range(R.num_edges), size):
            if is_matching(R, M)[0]:
                decoded = decode_rainbow(M)
                assert is_matching(G, decoded)[0]
                assert len({colors[e] for e in decoded}) == len(decoded)


@SETTINGS
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_disjoint_lift_round_trip(seed, m):
    rng = np.random.default_rng(seed)
    G, H = random_bipartite(rng, 3, 2, 2, 5, n_configs=2)
    lifted_G, _ = lift_disjoint(G, H, m)
    solutions = oracles.disjoint_solutions(G.edges, list(G.bipartition[0]), H.configs, m, limit=5)
    for sol in solutions:
        encoded = encode_disjoint(G, sol)
        assert is_matching(lifted_G, encoded)[0]
        assert decode_disjoint(G, m, encoded) == list(sol)
