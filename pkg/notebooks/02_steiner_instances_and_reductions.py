# %% [markdown]
# # Steiner instances and reductions
#
# For triple systems on `n` points, `G` has a vertex per pair and an edge per
# triple (its three pairs).  A matching is a partial Steiner triple system.
# With `g = 4` the configuration hypergraph forbids every Pasch configuration
# (four triples on six points).

# %%
from avoidmatch.designs import (EdgeColoring, ListAssignment, SteinerHost, build_rainbow, build_steiner_aux,
                                decode_disjoint, decode_list, lift_disjoint, lift_list)
from avoidmatch.finish import finish_matching
from avoidmatch.hypercore import ConfigHypergraph, Hypergraph

G, H = build_steiner_aux(7, 3, 2, 4)
print(G, H)
host = SteinerHost(7, 3, 2)
pasch = [(0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5)]
ids = tuple(sorted(host.edge_id(b) for b in pasch))
print("Pasch as a configuration:", ids, ids in set(H.configs))

# %% [markdown]
# ## Rainbow matchings
# Each colour becomes a fresh vertex added to its edges, so matchings of the
# rainbow hypergraph are exactly the rainbow matchings of the coloured graph.

# %%
path = Hypergraph(4, [[0, 1], [1, 2], [2, 3]])
R = build_rainbow(path, EdgeColoring((0, 1, 0)))
print("rainbow edges:", R.edges)

# %% [markdown]
# ## Lifts
# `lift_disjoint` turns "find m edge-disjoint A-perfect matchings" into one
# A-perfect matching problem; `lift_list` does the same for list edge colourings.

# %%
bip = Hypergraph(5, [[0, 2], [0, 3], [1, 3], [1, 4]], ([0, 1], [2, 3, 4]))
L, HL = lift_disjoint(bip, ConfigHypergraph(4), 2)
print("disjoint lift:", L, "A-side size", len(L.bipartition[0]))
first, second = decode_disjoint(bip, 2, finish_matching(L, HL, seed=0).matching)
print("two edge-disjoint A-perfect matchings:", sorted(first), sorted(second))

lists = ListAssignment(((0,), (1, 2), (0,)))
L2, HL2, labels = lift_list(path, ConfigHypergraph(3), lists)
print("list lift edges:", L2.num_edges, "labels (edge, colour):", labels)

# any A-perfect matching of the lift is a proper list colouring of the path
solved = finish_matching(L2, HL2, seed=0)
print("colouring:", decode_list(labels, solved.matching))
