"""Breadth-first parity two-colouring (red-black ordering)."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.sparse import csgraph

from .graph import Graph, NodePermutation, Partition, frustration, is_connected


class RedBlackResult(NamedTuple):
    partition: Partition
    permutation: NodePermutation
    is_exact: bool


def red_black_order(g: Graph, root: int = 0) -> RedBlackResult:
    """Split nodes by the parity of their BFS distance from ``root``.

    Neighbours are visited in ascending index order.  The even-distance set
    is set 1 unless it is the smaller one.  The permutation lists set 1 then
    set 2, each in BFS visiting order.  On non-bipartite graphs the parity
    split is still returned, with ``is_exact`` false.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range for {g.n} nodes")
    if not is_connected(g):
        raise ValueError("graph is disconnected; run on each connected component")
    a = g.to_sparse()
    a.sort_indices()
    order, pred = csgraph.breadth_first_order(a, root, directed=True,
                                              return_predecessors=True)
    # BFS order lists nodes by nondecreasing depth, so one pass suffices.
    depth = np.zeros(g.n, dtype=np.int64)
    for v in order[1:]:
        depth[v] = depth[pred[v]] + 1
    even = depth % 2 == 0
    if 2 * even.sum() < g.n:
        even = ~even
    labels = np.where(even, 1, 2)
    visit = np.asarray(order)
    seq = np.concatenate([visit[even[visit]], visit[~even[visit]]])
    part = Partition(labels)
    return RedBlackResult(part, NodePermutation.from_order(seq), frustration(g, part) == 0)
