import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from specbip.bipartizer import (BipartizeOptions, DisconnectedGraphError,
                                approximate_eigenvectors, bipartize, bipartize_components,
                                detect_anticommunity, estimate_cardinalities,
                                pair_eigenvalues, reconstruct, round_adjacency,
                                separating_permutation)
from specbip.graph import (Graph, NodePermutation, Partition, connected_components,
                           extract_subgraph, frustration, permute)
from specbip.linalg import eigh, eigvalsh
from specbip.metrics import bipartivity_defect
from specbip.testgen import TestSpec, make_experiment

SQ2 = np.sqrt(2.0)


# -- brute-force pairing oracle --------------------------------------------

def _matchings(idx):
    if not idx:
        yield []
        return
    first, rest = idx[0], idx[1:]
    for k, other in enumerate(rest):
        for m in _matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + m


def brute_force_pairing_cost(alpha, n1, n2):
    """Smallest sum of squares over every choice of zeros and +/- pairs.

    For a fixed pair (i, j) the best value is ``b = (a_i - a_j) / 2`` with cost
    ``(a_i + a_j)**2 / 2``; a zero costs ``a_i**2``.
    """
    n = n1 + n2
    best = np.inf
    for zeros in itertools.combinations(range(n), n1 - n2):
        rest = [i for i in range(n) if i not in zeros]
        zc = sum(alpha[i] ** 2 for i in zeros)
        for m in _matchings(rest):
            best = min(best, zc + sum((alpha[i] + alpha[j]) ** 2 / 2 for i, j in m))
    return best


def pairing_cost(alpha, n1, n2):
    beta = pair_eigenvalues(alpha, n1, n2)
    return float(np.sum((alpha - beta) ** 2))


# -- cardinality estimate ---------------------------------------------------

def test_estimate_gap_example():
    est = estimate_cardinalities([1e-16, -1e-16, 0.8, -0.9, 1.2, -1.3])
    assert (est.k, est.n1, est.n2, est.gap_found) == (2, 4, 2, True)
    assert est.ratios[est.k - 1] == est.ratios[np.isfinite(est.ratios)].max()


def test_estimate_no_gap():
    est = estimate_cardinalities([1, 1, 1, 1])
    assert (est.n1, est.n2, est.k, est.gap_found) == (2, 2, 0, False)
    assert estimate_cardinalities(np.ones(5)).n1 == 3


def test_estimate_tau_excludes_tiny_jump():
    est = estimate_cardinalities([1e-12, 1e-12, 1e-9, 1])
    assert (est.k, est.n1, est.n2) == (3, 3, 1)


def test_estimate_exact_zeros_are_safe():
    est = estimate_cardinalities([0.0, 0.0, 2.0, -2.0])
    assert (est.k, est.n1, est.n2) == (2, 3, 1)
    assert np.isnan(est.ratios[0]) and np.isinf(est.ratios[1])


def test_estimate_round_half_up():
    # n - k = 3 -> n2 = round(1.5) = 2
    est = estimate_cardinalities([0, 1, 1, -1])
    assert (est.k, est.n2, est.n1) == (1, 2, 2)


def test_estimate_needs_two_values():
    with pytest.raises(ValueError):
        estimate_cardinalities([1.0])


def test_options_validation_and_swap():
    assert BipartizeOptions(n1n2=(2, 5)).n1n2 == (5, 2)
    for bad in (dict(gap_ratio=1.0), dict(zero_tol=0.0), dict(mode="fuzzy"), dict(n1n2=(3, 0))):
        with pytest.raises(ValueError):
            BipartizeOptions(**bad)


# -- eigenvalue pairing -------------------------------------------------------

def test_pairing_examples():
    assert np.allclose(pair_eigenvalues(np.array([3, 1, 0, -2.0]), 2, 2), [2.5, 0.5, -0.5, -2.5])
    assert np.array_equal(pair_eigenvalues(np.array([2, 0, -2.0]), 2, 1), [2, 0, -2])
    assert np.array_equal(pair_eigenvalues(np.ones(4), 3, 1), np.zeros(4))


def test_pairing_rejects_bad_input():
    with pytest.raises(ValueError):
        pair_eigenvalues([1.0, 2.0], 1, 1)
    with pytest.raises(ValueError):
        pair_eigenvalues([2.0, 1.0, 0.0], 1, 1)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
def test_pairing_is_monotone_paired_and_optimal(vals):
    alpha = np.sort(np.array(vals))[::-1]
    n = alpha.size
    for n2 in range(0, n // 2 + 1):
        n1 = n - n2
        beta = pair_eigenvalues(alpha, n1, n2)
        assert np.all(np.diff(beta) <= 1e-15)
        assert np.allclose(beta, -beta[::-1])
        assert np.count_nonzero(beta == 0) >= n1 - n2
        assert abs(pairing_cost(alpha, n1, n2) - brute_force_pairing_cost(alpha, n1, n2)) <= 1e-12


# -- separating permutation ---------------------------------------------------

def test_separating_permutation_row_norm_example():
    w = np.array([[0.3, 0.1, 0.2], [0.1, -0.9, 0.4], [0.2, 0.5, 0.1]])
    sigma = separating_permutation(w, 2, 1)
    assert (sigma.order + 1).tolist() == [2, 3, 1]


def test_separating_permutation_shape_check():
    with pytest.raises(ValueError):
        separating_permutation(np.eye(3), 2, 2)


def test_separating_permutation_four_cycle():
    c4 = Graph.from_edges(4, [0, 1, 2, 3], [1, 2, 3, 0])
    p = NodePermutation.from_order([3, 1, 0, 2])
    g = permute(c4, p)
    sigma = separating_permutation(eigh(g.to_dense()).vectors, 2, 2)
    part = Partition.from_first(4, sigma.order[:2])
    oracle = Partition(np.array([1, 2, 1, 2])).permuted(p)  # BFS colouring of C4
    assert frustration(g, part) == 0
    assert part == oracle or part == Partition(3 - oracle.labels)


def test_separating_permutation_degree_one_neighbour():
    # Node 0 in the larger set is the only neighbour of leaf 5; its row of the
    # null-space block vanishes and must still land in the first set.
    c = np.array([[1, 0], [1, 1], [0, 1], [1, 0]], float)
    n1, n2 = c.shape
    a = np.block([[np.zeros((n1, n1)), c], [c.T, np.zeros((n2, n2))]])
    g = Graph.from_dense(a)
    b = bipartize(g)
    assert frustration(g, b.partition) == 0
    assert np.array_equal(b.a_b, a)


# -- structured eigenvectors --------------------------------------------------

def _structured_q(n1, n2, seed):
    rng = np.random.default_rng(seed)
    x, _ = np.linalg.qr(rng.standard_normal((n1, n1)))
    y, _ = np.linalg.qr(rng.standard_normal((n2, n2)))
    u1, u2, v = x[:, :n2] / SQ2, x[:, n2:], y / SQ2
    q = np.block([[u1, u2, u1[:, ::-1]], [v, np.zeros((n2, n1 - n2)), -v[:, ::-1]]])
    return q, u1, u2, v


@pytest.mark.parametrize("n1, n2", [(4, 2), (3, 3), (5, 1)])
def test_approximate_eigenvectors_exact_form(n1, n2):
    q, u1, u2, v = _structured_q(n1, n2, n1 * 10 + n2)
    assert np.allclose(q.T @ q, np.eye(n1 + n2))
    r1, r2, rv, defects = approximate_eigenvectors(q, n1, n2)
    assert np.allclose(r1, u1, atol=1e-12) and np.allclose(rv, v, atol=1e-12)
    assert np.allclose(r2, u2, atol=1e-12)
    assert max(defects.values()) < 1e-12


def test_approximate_eigenvectors_diagonal_block():
    # W11 + W13 Z = diag(2, 0.5) / sqrt(2); the closest scaled-orthogonal U1 is I / sqrt(2)
    w = np.zeros((4, 4))
    w[:2, :2] = np.diag([2.0, 0.5]) / SQ2
    w[2:, :2] = np.eye(2)
    u1, _, _, _ = approximate_eigenvectors(w, 2, 2)
    assert np.allclose(u1, np.eye(2) / SQ2)


def test_approximate_eigenvectors_random_orthogonal():
    w, _ = np.linalg.qr(np.random.default_rng(5).standard_normal((6, 6)))
    u1, u2, v, _ = approximate_eigenvectors(w, 4, 2)
    assert np.allclose(u1.T @ u1, np.eye(2) / 2, atol=1e-10)
    assert np.allclose(v.T @ v, np.eye(2) / 2, atol=1e-10)
    assert np.allclose(u2.T @ u2, np.eye(2), atol=1e-10)


def test_approximate_eigenvectors_fixes_partner_signs():
    q, u1, u2, v = _structured_q(4, 2, 3)
    q[:, -1] *= -1   # the eigensolver may return either sign
    r1, _, rv, defects = approximate_eigenvectors(q, 4, 2)
    assert np.allclose(r1, u1) and np.allclose(rv, v) and max(defects.values()) < 1e-12


# -- reconstruction and rounding ---------------------------------------------

def test_reconstruct_small_example():
    u1 = np.array([[0.5], [0.5]])
    u2 = np.array([[0.5], [-0.5]]) * SQ2
    v = np.array([[1 / SQ2]])
    a = reconstruct(u1, u2, v, pair_eigenvalues(np.array([SQ2, 0, -SQ2]), 2, 1))
    assert np.allclose(a[:2, 2:], [[1], [1]])
    assert np.all(a[:2, :2] == 0) and a[2, 2] == 0


def test_reconstruct_zero_beta():
    q, u1, u2, v = _structured_q(3, 2, 1)
    assert np.array_equal(reconstruct(u1, u2, v, np.zeros(5)), np.zeros((5, 5)))


def test_reconstruct_round_trip():
    c = np.random.default_rng(2).random((5, 3))
    a = np.block([[np.zeros((5, 5)), c], [c.T, np.zeros((3, 3))]])
    f = eigh(a)
    u1, u2, v, _ = approximate_eigenvectors(f.vectors, 5, 3)
    a_b, res = reconstruct(u1, u2, v, pair_eigenvalues(f.values, 5, 3), return_residual=True)
    assert np.allclose(a_b, a, atol=1e-10) and res < 1e-12


def test_reconstruct_shape_check():
    with pytest.raises(ValueError):
        reconstruct(np.zeros((3, 2)), np.zeros((3, 1)), np.zeros((2, 2)), np.zeros(4))


def test_rounding_modes():
    a = np.array([[0, 0.7, -0.3], [0.7, 0, 0], [-0.3, 0, 0]])
    assert round_adjacency(a, "binary")[0, 1] == 1 and round_adjacency(a, "binary")[0, 2] == 0
    assert round_adjacency(a, "nonnegative")[0, 2] == 0
    assert round_adjacency(a, "nonnegative")[0, 1] == 0.7
    s = round_adjacency(a, "signed")
    assert np.array_equal(s, a) and s is not a
    assert round_adjacency(np.array([[0, 2.6], [2.6, 0]]), "integer")[0, 1] == 3
    with pytest.raises(ValueError):
        round_adjacency(a, "fuzzy")


# -- whole pipeline -------------------------------------------------------------

def test_star_is_recovered():
    star = Graph.from_edges(4, [0, 0, 0], [1, 2, 3])
    p = NodePermutation.from_order([2, 0, 3, 1])
    g = permute(star, p)
    b = bipartize(g)
    assert (b.n1, b.n2) == (3, 1)
    assert frustration(g, b.partition) == 0
    assert np.array_equal(b.a_b, g.to_dense())
    assert b.partition.second.tolist() == [int(p.map[0])]


def test_four_cycle_with_supplied_sizes():
    c4 = Graph.from_edges(4, [0, 1, 2, 3], [1, 2, 3, 0])
    b = bipartize(c4, BipartizeOptions(n1n2=(2, 2)))
    assert frustration(c4, b.partition) == 0 and np.array_equal(b.a_b, c4.to_dense())


def test_four_cycle_estimate_counts_extra_zero():
    # rank(C) = 1, so the spectrum (2, 0, 0, -2) suggests sizes (3, 1)
    c4 = Graph.from_edges(4, [0, 1, 2, 3], [1, 2, 3, 0])
    b = bipartize(c4)
    assert (b.estimate.k, b.n1, b.n2) == (2, 3, 1)


def test_supplied_sizes_note_and_checks():
    g = Graph.from_edges(4, [0, 0, 0], [1, 2, 3])
    b = bipartize(g, BipartizeOptions(n1n2=(2, 2)))
    assert b.notes and "differ" in b.notes[0]
    with pytest.raises(ValueError):
        bipartize(g, BipartizeOptions(n1n2=(2, 1)))


def test_disconnected_input_is_rejected():
    g = Graph.from_edges(4, [0, 2], [1, 3])
    with pytest.raises(DisconnectedGraphError, match="connected_components"):
        bipartize(g)
    with pytest.raises(ValueError):
        bipartize(Graph.from_edges(1, [], []))


def test_modes_share_partition():
    exp = make_experiment(TestSpec(30, 20, 0.2, 0.02, seed=4))
    g = exp.scrambled
    nodes = connected_components(g).largest
    g = extract_subgraph(g, nodes)
    f = eigh(g.to_dense())
    runs = {m: bipartize(g, BipartizeOptions(mode=m), factorization=f)
            for m in ("signed", "nonnegative", "binary")}
    assert runs["signed"].partition == runs["binary"].partition
    assert np.array_equal(runs["signed"].a_b_signed, runs["binary"].a_b_signed)
    assert np.array_equal(runs["signed"].a_b, runs["binary"].a_b_signed)
    assert np.all(runs["nonnegative"].a_b >= 0)


def _blocks_are_zero(b):
    sorted_ab = b.a_b_signed[np.ix_(b.sigma.order, b.sigma.order)]
    return (np.all(sorted_ab[:b.n1, :b.n1] == 0) and np.all(sorted_ab[b.n1:, b.n1:] == 0))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 30), st.integers(2, 30), st.floats(0.05, 0.6), st.floats(0, 0.2),
       st.integers(0, 10**6))
def test_output_invariants(n1, n2, xi, eta, seed):
    n1, n2 = max(n1, n2), min(n1, n2)
    exp = make_experiment(TestSpec(n1, n2, xi, eta, seed))
    g = extract_subgraph(exp.scrambled, connected_components(exp.scrambled).largest)
    assume(g.n >= 2)
    b = bipartize(g)
    assert _blocks_are_zero(b)
    assert np.all(np.diff(b.beta) <= 0)
    assert np.allclose(b.beta, -b.beta[::-1])
    spec = np.sort(eigvalsh(b.a_b_signed))
    assert np.allclose(spec, np.sort(b.beta), atol=1e-8)
    assert np.allclose(spec, -spec[::-1], atol=1e-8)
    assert abs(bipartivity_defect(b.a_b_signed)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(1, 40), st.floats(0.02, 1.0), st.booleans(),
       st.integers(0, 10**6))
def test_exact_on_bipartite_graphs_with_full_rank_cross_block(n1, n2, xi, weighted, seed):
    n1, n2 = max(n1, n2), min(n1, n2)
    exp = make_experiment(TestSpec(n1, n2, xi, 0.0, seed, weighted))
    for nodes in connected_components(exp.scrambled):
        if nodes.size < 2:
            continue
        g = extract_subgraph(exp.scrambled, nodes)
        part = exp.partition.restrict(nodes)
        c = g.to_dense()[np.ix_(part.first, part.second)]
        if np.linalg.matrix_rank(c) < part.n2:
            continue   # extra zero eigenvalues: the size estimate cannot be exact
        b = bipartize(g, BipartizeOptions(mode="signed" if weighted else "binary"))
        assert frustration(g, b.partition) == 0
        assert np.allclose(b.a_b, g.to_dense(), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_permutation_equivariance(seed, rnd):
    exp = make_experiment(TestSpec(24, 12, 0.2, 0.01, seed))
    g = extract_subgraph(exp.scrambled, connected_components(exp.scrambled).largest)
    order = list(range(g.n))
    rnd.shuffle(order)
    p = NodePermutation.from_order(order)
    b0, b1 = bipartize(g), bipartize(permute(g, p))
    assert (b0.n1, b0.n2) == (b1.n1, b1.n2)
    # Row-norm ties may be broken differently; the frustration must agree.
    if b0.partition.permuted(p) != b1.partition:
        assert np.isclose(frustration(g, b0.partition),
                          frustration(permute(g, p), b1.partition))


def test_anticommunity_exact_structure():
    rng = np.random.default_rng(8)
    n1, n2 = 9, 5
    c = (rng.random((n1, n2)) < 0.5).astype(float)
    c[np.arange(n2), np.arange(n2)] = 1.0
    assert np.linalg.matrix_rank(c) == n2
    bb = np.triu((rng.random((n2, n2)) < 0.5).astype(float), 1)
    a = np.block([[np.zeros((n1, n1)), c], [c.T, bb + bb.T]])
    p = NodePermutation(rng.permutation(n1 + n2))
    g = permute(Graph.from_dense(a), p)
    b = detect_anticommunity(g)
    assert (b.n1, b.n2) == (n1, n2)
    assert b.internal_edges == 0 and b.internal_weight == 0
    assert sorted(b.partition.first.tolist()) == sorted(p.map[:n1].tolist())


def test_bipartize_components():
    g = Graph.from_edges(7, [0, 0, 3, 4], [1, 2, 4, 5])
    res = bipartize_components(g, min_size=2)
    assert len(res.results) == 2 and [s.tolist() for s in res.skipped] == [[6]]
    lab = res.labels()
    assert lab[6] == 0 and frustration(g, np.where(lab == 0, 1, lab)) == 0
    assert np.array_equal(res.a_b(), g.to_dense())
    with pytest.raises(ValueError):
        bipartize_components(g, BipartizeOptions(n1n2=(4, 3)))
