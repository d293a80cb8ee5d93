"""Find a large anti-community in a core-periphery graph.

Eighty peripheral nodes each attach to a few of twenty core nodes, and the
core is densely wired among itself.  The periphery has almost no internal
edges, so it comes out as the larger set.
"""
import numpy as np

from specbip import BipartizeOptions, Graph, detect_anticommunity

rng = np.random.default_rng(3)
n_per, n_core = 80, 20
rows, cols = [], []
for p in range(n_per):
    for c in rng.choice(n_core, size=3, replace=False):
        rows.append(p)
        cols.append(n_per + c)
core = np.triu(rng.random((n_core, n_core)) < 0.6, 1)
i, j = np.nonzero(core)
rows += (n_per + i).tolist()
cols += (n_per + j).tolist()
for _ in range(4):                      # a little periphery chatter
    p, q = rng.choice(n_per, 2, replace=False)
    rows.append(p)
    cols.append(q)
g = Graph.from_edges(n_per + n_core, rows, cols)

b = detect_anticommunity(g, BipartizeOptions())
found = set(b.members.tolist())
print(f"sets ({b.n1}, {b.n2}); gap found: {b.estimate.gap_found}")
print(f"periphery nodes in the anti-community: {len(found & set(range(n_per)))} of {n_per}")
print(f"edges inside the anti-community: {b.internal_edges}")
