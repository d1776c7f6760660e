# %% [markdown]
# # Hypergraphs, configuration hypergraphs and their metrics
#
# A host hypergraph `G` carries the edges we want to match.  A configuration
# hypergraph `H` lives on the *edge ids* of `G`: each configuration is a set
# of pairwise disjoint G-edges that a matching must not contain in full.

# %%
from avoidmatch.hypercore import (ConfigHypergraph, Hypergraph, girth, is_h_avoiding, is_matching,
                                  max_weighted_degree, weighted_degree)

G = Hypergraph(8, [[0, 1], [2, 3], [4, 5], [6, 7], [1, 2]])
H = ConfigHypergraph(G.num_edges, [[0, 1], [0, 2, 3], [0, 1, 2]], G)
print(G)
print("configurations after normalization:", H.configs)

# %% [markdown]
# `{0, 1, 2}` was dropped: it contains `{0, 1}`, so avoiding the smaller set
# already avoids it.  Matchings are checked directly:

# %%
print("is {0, 2, 3} a matching?", is_matching(G, [0, 2, 3]))
print("does {0, 2, 3} avoid H?", is_h_avoiding(H, [0, 2, 3]))
print("does {0, 2} avoid H?", is_h_avoiding(H, [0, 2]))

# %% [markdown]
# The weighted degree discounts a configuration of size `i` by `D^(i-1)` and
# weighs it by `i-1`, so large configurations matter less at large `D`.

# %%
for D in (1.0, 2.0, 10.0):
    print(f"D={D:>4}: w(edge 0) = {weighted_degree(H, D, 0):.3f}, max = {max_weighted_degree(H, D):.3f}")

# %% [markdown]
# Girth: two configurations sharing two edges form a 2-cycle.

# %%
H2 = ConfigHypergraph(6, [[0, 1, 2], [1, 2, 3], [3, 4, 5]])
length, witness = girth(H2, cap=4)
print("girth", length, "witness", witness)
