"""Hide a bipartite graph behind a random relabelling and get it back.

A random (60, 30) bipartite graph is scrambled, then bipartized without
telling the method the set sizes.  The zero eigenvalues give the sizes away,
and the rebuilt binary matrix is the scrambled input again.
"""
import numpy as np

from specbip import (BipartizeOptions, TestSpec, bipartize, frustration,
                     is_connected, make_experiment)

for seed in range(50):
    exp = make_experiment(TestSpec(60, 30, xi=0.15, seed=seed))
    if is_connected(exp.scrambled):
        break
g = exp.scrambled
print(f"seed {seed}: n={g.n}, m={g.m}")

b = bipartize(g, BipartizeOptions(mode="binary"))
est = b.estimate
print(f"near-zero eigenvalues: {est.n_zero}, jump at k={est.k}, "
      f"ratio {est.ratios[est.k - 1]:.2e}")
print(f"estimated sizes ({b.n1}, {b.n2}), truth ({exp.partition.n1}, {exp.partition.n2})")
print("frustrated weight:", frustration(g, b.partition))
print("A_B equals the input:", np.array_equal(b.a_b, g.to_dense()))
print("Procrustes defects:", {k: f"{v:.1e}" for k, v in b.procrustes_defect.items()})

# the permutation puts the first set in front; the diagonal blocks are empty
a = g.to_dense()[np.ix_(b.sigma.order, b.sigma.order)]
print("weight inside the diagonal blocks after reordering:",
      a[:b.n1, :b.n1].sum() + a[b.n1:, b.n1:].sum())
