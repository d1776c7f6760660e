# %% [markdown]
# # Completing an A-perfect matching
#
# When every A-vertex has many more edges than any B-vertex has, picking an
# edge per A-vertex at random and resampling violated constraints terminates
# quickly with an A-perfect, configuration-avoiding matching.

# %%
import numpy as np

from avoidmatch.finish import check_hypotheses, finish_matching
from avoidmatch.hypercore import ConfigHypergraph, Hypergraph
from avoidmatch.verify import verify_matching_output

rng = np.random.default_rng(0)
n_a, D, r = 5, 3, 2
d_a = 8 * r * D
n_b = n_a * d_a // D + 1
edges, load = [], np.zeros(n_b, dtype=int)
for a in range(n_a):
    for _ in range(d_a):
        b = int(rng.choice(np.flatnonzero(load < D)))
        load[b] += 1
        edges.append([a, n_a + b])
G = Hypergraph(n_a + n_b, edges, (range(n_a), range(n_a, n_a + n_b)))
H = ConfigHypergraph(G.num_edges, [[0, d_a], [d_a, 2 * d_a]], G)
print(check_hypotheses(G, H))

res = finish_matching(G, H, seed=11)
print("success:", res.success, "resamples:", res.resamples)
print("matching:", sorted(res.matching))
print("verified:", verify_matching_output(G, H, sorted(res.matching)).passed)

# %% [markdown]
# Without room to manoeuvre the budget runs out and the result says so.

# %%
tight = Hypergraph(3, [[0, 2], [1, 2]], ([0, 1], [2]))
stuck = finish_matching(tight, ConfigHypergraph(2), seed=0, budget=50)
print("success:", stuck.success, "last events:", [e.kind for e in stuck.stuck])
