import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from avoidmatch.hypercore import ConfigHypergraph, Hypergraph  # noqa: E402

FANO = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
PASCH = [(0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5)]


def random_bipartite(rng, n_a, r, D, d_a, n_configs=0, max_cfg=3):
    """A-vertices ``0..n_a-1``, each with ``d_a`` edges; B-degrees stay at most ``D``."""
    n_b = int(np.ceil(n_a * d_a * (r - 1) / D)) + r
    load = np.zeros(n_b, dtype=int)
    edges = []
    for a in range(n_a):
        for _ in range(d_a):
            free = np.flatnonzero(load < D)
            bs = rng.choice(free, r - 1, replace=False)
            load[bs] += 1
            edges.append([a] + [n_a + int(b) for b in bs])
    G = Hypergraph(n_a + n_b, edges, (range(n_a), range(n_a, n_a + n_b)))
    cfgs = []
    tries = 0
    while len(cfgs) < n_configs and tries < 100 * (n_configs + 1):
        tries += 1
        k = int(rng.integers(2, max_cfg + 1))
        ids = rng.choice(G.num_edges, k, replace=False)
        verts = [v for i in ids for v in G.edge(int(i))]
        if len(verts) == len(set(verts)):
            cfgs.append(sorted(int(i) for i in ids))
    return G, ConfigHypergraph(G.num_edges, cfgs, G)


def random_graph(rng, n, m, k=2):
    edges = [sorted(rng.choice(n, k, replace=False).tolist()) for _ in range(m)]
    return Hypergraph(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion; the summary prints them in order."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, passed: bool, detail: str) -> bool:
        lines.append((number, f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
