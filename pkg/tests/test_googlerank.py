"""Power-iteration ranking against an independently built dense oracle.

The oracle constructs the full damped transition matrix from first
principles (column-normalize, dangling columns uniform, damp, teleport)
and solves the fixed point with a dense linear solve — no code shared
with the iterative implementation under test.
"""

import io

import numpy as np
import pytest

from rankplane import (
    ContractViolation,
    ConvergenceError,
    DirectedGraph,
    RankVector,
    apply_google,
    cheirank,
    invert,
    load_edge_list,
    pagerank,
    read_rank_vector,
    write_rank_vector,
)


def dense_google_matrix(g, alpha):
    n = g.n_nodes
    a = g.adj.toarray().astype(float).T  # a[i, j] = weight of j -> i
    col = a.sum(axis=0)
    s = np.empty_like(a)
    for j in range(n):
        s[:, j] = a[:, j] / col[j] if col[j] > 0 else 1.0 / n
    return alpha * s + (1.0 - alpha) / n


def dense_fixed_point(g, alpha):
    """Solve (I - alpha*S) p = (1 - alpha)/n * 1 directly."""
    n = g.n_nodes
    gm = dense_google_matrix(g, alpha)
    s = (gm - (1.0 - alpha) / n) / alpha  # recover S from the damped matrix
    p = np.linalg.solve(np.eye(n) - alpha * s, np.full(n, (1.0 - alpha) / n))
    return p / p.sum()


def random_graph(rng, n=30, density=0.1):
    mask = rng.random((n, n)) < density
    src, dst = np.nonzero(mask)
    if len(src) == 0:
        src, dst = np.array([0]), np.array([1])
    return DirectedGraph.from_edges(
        [f"v{i}" for i in range(n)], src, dst, np.ones(len(src), dtype=np.int64)
    )


def test_two_node_chain_matches_hand_solution():
    g = load_edge_list(io.StringIO("a\tb\n"))
    p = pagerank(g)
    # (I - 0.85*S) p = 0.15/2 with S = [[0, .5], [1, .5]] gives p = (20/57, 37/57)
    np.testing.assert_allclose(p.values, [20 / 57, 37 / 57], rtol=0, atol=1e-10)
    p_star = cheirank(g)
    np.testing.assert_allclose(p_star.values, [37 / 57, 20 / 57], rtol=0, atol=1e-10)


def test_matches_dense_solve_on_seeded_graphs():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        g = random_graph(rng)
        for alpha in (0.5, 0.85, 0.99):
            # alpha = 0.99 contracts slowly (~alpha per step); allow more steps
            p = pagerank(g, alpha=alpha, max_iter=5000, tol=1e-10)
            expected = dense_fixed_point(g, alpha)
            # stopping residual r bounds the fixed-point distance by r*a/(1-a)
            bound = 1e-10 * alpha / (1.0 - alpha) + 1e-12
            assert np.abs(p.values - expected).sum() < max(bound, 1e-10)


def test_multiplicities_weight_the_walk():
    g = load_edge_list(io.StringIO("a\tb\t3\na\tc\n"))
    p = pagerank(g)
    expected = dense_fixed_point(g, 0.85)
    assert np.abs(p.values - expected).sum() < 1e-9
    assert p.values[1] > p.values[2]  # b receives 3/4 of a's push


def test_uniform_on_directed_cycle():
    n = 10
    src = np.arange(n)
    dst = (src + 1) % n
    g = DirectedGraph.from_edges([f"v{i}" for i in range(n)], src, dst, np.ones(n, int))
    p = pagerank(g)
    np.testing.assert_allclose(p.values, np.full(n, 1 / n), atol=1e-14)


def test_all_dangling_graph_is_uniform():
    g = DirectedGraph.from_edges(["a", "b", "c"], [], [], [])
    p = pagerank(g)
    np.testing.assert_allclose(p.values, np.full(3, 1 / 3), atol=1e-15)


def test_alpha_one_on_two_cycle():
    g = load_edge_list(io.StringIO("a\tb\nb\ta\n"))
    p = pagerank(g, alpha=1.0)
    np.testing.assert_allclose(p.values, [0.5, 0.5], atol=0)


def test_cheirank_is_pagerank_of_inverted_graph():
    rng = np.random.default_rng(42)
    g = random_graph(rng, n=25)
    assert np.array_equal(cheirank(g).values, pagerank(invert(g)).values)


def test_worker_count_does_not_change_bits():
    rng = np.random.default_rng(3)
    g = random_graph(rng, n=60, density=0.15)
    p1 = pagerank(g, workers=1)
    p4 = pagerank(g, workers=4)
    assert np.array_equal(p1.values, p4.values)
    assert p1.iterations == p4.iterations


def test_apply_google_matches_dense_operator():
    rng = np.random.default_rng(8)
    g = random_graph(rng, n=20)
    v = rng.random(20)
    v /= v.sum()
    got = apply_google(g, 0.85, v)
    expected = dense_google_matrix(g, 0.85) @ v
    np.testing.assert_allclose(got, expected, atol=1e-14)
    assert abs(got.sum() - 1.0) < 1e-12  # column-stochastic: mass preserved


def test_apply_google_validates_input():
    g = load_edge_list(io.StringIO("a\tb\n"))
    with pytest.raises(ContractViolation):
        apply_google(g, 0.85, np.array([0.7, 0.7]))  # sums to 1.4
    with pytest.raises(ContractViolation):
        apply_google(g, 0.85, np.array([1.5, -0.5]))  # negative entry
    with pytest.raises(ContractViolation):
        apply_google(g, 0.85, np.array([1.0]))  # wrong length


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.01])
def test_alpha_domain(alpha):
    g = load_edge_list(io.StringIO("a\tb\n"))
    with pytest.raises(ContractViolation):
        pagerank(g, alpha=alpha)


def test_solver_parameter_validation():
    g = load_edge_list(io.StringIO("a\tb\n"))
    with pytest.raises(ContractViolation):
        pagerank(g, tol=0.0)
    with pytest.raises(ContractViolation):
        pagerank(g, max_iter=0)


def test_convergence_error_carries_the_iterate():
    rng = np.random.default_rng(1)
    g = random_graph(rng, n=40)
    with pytest.raises(ConvergenceError) as err:
        pagerank(g, max_iter=2)
    e = err.value
    assert e.iterations == 2
    assert e.residual > 1e-10
    assert e.iterate.shape == (40,)
    assert abs(e.iterate.sum() - 1.0) < 1e-9  # still a usable distribution


def test_rank_vector_contract():
    with pytest.raises(ContractViolation):
        RankVector("pagerank", np.array([0.6, 0.6]), 0.85, 1, 0.0)
    with pytest.raises(ContractViolation):
        RankVector("pagerank", np.array([1.0, 0.0]), 0.85, 1, 0.0)  # zero entry
    # zero entries are admissible only in the undamped limit
    RankVector("pagerank", np.array([1.0, 0.0]), 1.0, 1, 0.0)


def test_rank_vector_file_round_trip(tmp_path):
    g = load_edge_list(io.StringIO("a\tb\nb\tc\nc\ta\na\tc\n"))
    p = pagerank(g)
    path = tmp_path / "p.tsv"
    write_rank_vector(p, g.names, path)
    p2, names = read_rank_vector(path)
    assert names == g.names
    assert np.array_equal(p.values, p2.values)  # repr round-trip is lossless
    assert p2.kind == "pagerank"
    assert p2.alpha == p.alpha
    assert p2.iterations == p.iterations
    assert p2.residual == p.residual
