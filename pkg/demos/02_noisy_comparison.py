"""Compare the spectral method with breadth-first two-colouring under noise.

Sparse edges are sprinkled inside both sets of a (256, 128) bipartite graph.
Red-black ordering commits to whatever the search tree says; the spectral
method looks at the whole spectrum.  The table averages five problems.
"""
from specbip.bench import BenchManifest, Cell, run_bench, summarize

man = BenchManifest([Cell(256, 128, 1e-2, 1e-4), Cell(256, 128, 1e-2, 1e-3)], trials=5)
print(f"{'eta':>8} {'method':>11} {'I_B':>10} {'E_B':>10} {'E_N':>10} {'frustration':>12}")
for row in summarize(man, run_bench(man)):
    print(f"{row['eta']:8.0e} {row['method']:>11} {row['I_B']:10.2e} {row['E_B']:10.2e} "
          f"{row['E_N']:10.2e} {row['frustration']:12.1f}")
