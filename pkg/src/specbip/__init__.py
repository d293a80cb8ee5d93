"""Spectral bipartization of networks and detection of large anti-communities."""
from .bipartizer import (Bipartization, BipartizeOptions, CardinalityEstimate,
                         DisconnectedGraphError, approximate_eigenvectors,
                         bipartize, bipartize_components, detect_anticommunity,
                         estimate_cardinalities, pair_eigenvalues, reconstruct,
                         round_adjacency, separating_permutation)
from .graph import (Graph, NodePermutation, ParseError, Partition,
                    connected_components, extract_subgraph, frustration,
                    is_connected, load_graph, permute, strip, write_graph)
from .linalg import ConvergenceError, closest_orthogonal, eigh, eigvalsh, svd
from .metrics import (QualityReport, bipartivity_defect, bipartivity_index,
                      error_indices, node_error)
from .redblack import red_black_order
from .testgen import TestSpec, make_experiment, perturb, random_bipartite, scramble

__version__ = "0.1.0"
