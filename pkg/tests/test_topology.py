import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlsgd.topology import (
    Graph,
    GraphGenerationError,
    MixingMatrix,
    contraction_check,
    gen_complete,
    gen_erdos_renyi,
    gen_path,
    graph_from_edge_list,
    graph_to_edge_list,
    matrix_from_csv,
    metropolis_weights,
    mixing_matrix_to_csv,
    second_eigenvalue_magnitude,
)


def bfs_reachable(n, edges):
    """Independent connectivity oracle."""
    adj = {i: set() for i in range(1, n + 1)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {1}, [1]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


# ---------------------------------------------------------------------------
# generators


def test_path_single_node():
    g = gen_path(1)
    assert g.n == 1 and g.edges == frozenset()


def test_path_two_nodes():
    g = gen_path(2)
    assert g.edges == frozenset({(1, 2)})
    assert g.degrees == (1, 1)


def test_path_four_nodes():
    g = gen_path(4)
    assert len(g.edges) == 3
    assert g.degrees == (1, 2, 2, 1)


def test_path_rejects_zero():
    with pytest.raises(ValueError):
        gen_path(0)


@pytest.mark.parametrize("n,m", [(3, 3), (1, 0), (10, 45)])
def test_complete_edge_count(n, m):
    assert len(gen_complete(n).edges) == m


def test_complete_rejects_zero():
    with pytest.raises(ValueError):
        gen_complete(0)


def test_er_forced_edge():
    g = gen_erdos_renyi(2, 1.0, seed=123)
    assert g.edges == frozenset({(1, 2)})


def test_er_connected_by_bfs_oracle():
    g = gen_erdos_renyi(20, 0.3, seed=7)
    assert g.n == 20
    assert bfs_reachable(20, g.edges) == set(range(1, 21))


def test_er_zero_p_rejected():
    with pytest.raises(ValueError):
        gen_erdos_renyi(5, 0.0, seed=1)


def test_er_deterministic():
    a = gen_erdos_renyi(20, 0.3, seed=7)
    b = gen_erdos_renyi(20, 0.3, seed=7)
    assert a.edges == b.edges
    assert a.edges != gen_erdos_renyi(20, 0.3, seed=8).edges


def test_er_gives_up_when_p_too_small():
    with pytest.raises(GraphGenerationError):
        gen_erdos_renyi(40, 1e-6, seed=0)


def test_graph_rejects_self_loop_and_bad_range():
    with pytest.raises(ValueError):
        Graph(3, frozenset({(2, 2)}))
    with pytest.raises(ValueError):
        Graph(3, frozenset({(1, 4)}))


# ---------------------------------------------------------------------------
# mixing matrices

# 3-node path, weights 1/(1+max deg): off-diagonals 1/3, diagonal (2/3, 1/3, 2/3).
# Characteristic polynomial by hand: trace 5/3, determinant 0, so the spectrum
# is {1, 2/3, 0}.


def test_metropolis_three_node_path_closed_form():
    w = metropolis_weights(gen_path(3))
    expect = np.array([[2 / 3, 1 / 3, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 1 / 3, 2 / 3]])
    assert np.allclose(w.w, expect, atol=1e-15)
    eig = np.sort(np.linalg.eigvalsh(w.w))
    assert np.allclose(eig, [0.0, 2 / 3, 1.0], atol=1e-12)
    assert w.rho == pytest.approx(2 / 3, abs=1e-12)
    assert w.gap_factor == pytest.approx(9 / 5, abs=1e-9)


def test_metropolis_complete_graph_is_uniform_averaging():
    # all degrees n-1, so every weight is 1/n and the diagonal closes to 1/n
    w = metropolis_weights(gen_complete(3))
    assert np.allclose(w.w, np.full((3, 3), 1 / 3), atol=1e-15)
    assert w.rho == pytest.approx(0.0, abs=1e-12)


def test_metropolis_single_node_convention():
    w = metropolis_weights(gen_path(1))
    assert w.w.shape == (1, 1) and w.w[0, 0] == 1.0
    assert w.rho == 0.0 and w.gap_factor == 1.0


def test_metropolis_rejects_disconnected():
    g = Graph(4, frozenset({(1, 2), (3, 4)}))
    with pytest.raises(ValueError):
        metropolis_weights(g)


def test_second_eigenvalue_identity():
    assert second_eigenvalue_magnitude(np.eye(4)) == pytest.approx(1.0)


def test_second_eigenvalue_uniform_averaging():
    assert second_eigenvalue_magnitude(np.full((5, 5), 0.2)) == pytest.approx(0.0, abs=1e-12)


def test_path_gap_factors_match_reported_values():
    reported = {4: 2.84, 8: 10.1, 16: 39.3, 32: 156, 64: 623}
    for n, expect in reported.items():
        w = metropolis_weights(gen_path(n))
        assert abs(w.gap_factor - expect) <= 0.01 * expect


def test_double_stochasticity_and_symmetry():
    for g in (gen_path(7), gen_complete(6), gen_erdos_renyi(15, 0.4, seed=3)):
        w = metropolis_weights(g)
        assert np.array_equal(w.w, w.w.T)
        assert np.abs(w.w.sum(axis=1) - 1.0).max() <= 1e-12
        assert w.w.min() >= 0.0


def test_adjacency_support():
    g = gen_erdos_renyi(12, 0.35, seed=11)
    w = metropolis_weights(g)
    for i in range(1, 13):
        for j in range(i + 1, 13):
            if (i, j) in g.edges:
                assert w.w[i - 1, j - 1] > 0.0
            else:
                assert w.w[i - 1, j - 1] == 0.0


def test_average_preservation():
    rng = np.random.default_rng(5)
    w = metropolis_weights(gen_erdos_renyi(10, 0.4, seed=2))
    x = rng.standard_normal((6, 10))
    assert np.abs((x @ w.w).mean(axis=1) - x.mean(axis=1)).max() <= 1e-12


def test_connected_implies_rho_below_one():
    for seed in range(20):
        w = metropolis_weights(gen_erdos_renyi(12, 0.3, seed=seed))
        assert w.rho <= 1.0 - 1e-12


# ---------------------------------------------------------------------------
# contraction


def test_contraction_zero_matrix():
    w = metropolis_weights(gen_path(4))
    lhs, rhs = contraction_check(w, np.zeros((3, 4)))
    assert lhs == 0.0 and rhs == 0.0


def test_contraction_uniform_averaging_annihilates():
    w = MixingMatrix.from_dense(np.full((6, 6), 1 / 6))
    rng = np.random.default_rng(0)
    y = rng.standard_normal((4, 6))
    y -= y.mean(axis=1, keepdims=True)
    lhs, _ = contraction_check(w, y)
    assert lhs <= 1e-28


def test_contraction_rejects_uncentered_rows():
    w = metropolis_weights(gen_path(4))
    with pytest.raises(ValueError):
        contraction_check(w, np.ones((2, 4)))


def test_contraction_thousand_random_pairs():
    rng = np.random.default_rng(42)
    violations = 0
    for trial in range(1000):
        n = int(rng.integers(2, 12))
        w = metropolis_weights(gen_erdos_renyi(n, 0.5, seed=int(rng.integers(0, 10**6))))
        y = rng.standard_normal((int(rng.integers(1, 6)), n))
        y -= y.mean(axis=1, keepdims=True)
        lhs, rhs = contraction_check(w, y)
        if lhs > rhs + 1e-9:
            violations += 1
    assert violations == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(0, 10**6), st.integers(1, 5))
def test_contraction_property(n, seed, d):
    w = metropolis_weights(gen_erdos_renyi(n, 0.6, seed=seed))
    y = np.random.default_rng(seed + 1).standard_normal((d, n))
    y -= y.mean(axis=1, keepdims=True)
    lhs, rhs = contraction_check(w, y)
    assert lhs <= rhs + 1e-9


# ---------------------------------------------------------------------------
# text formats


def test_edge_list_round_trip():
    g = gen_erdos_renyi(9, 0.5, seed=4)
    text = graph_to_edge_list(g)
    back = graph_from_edge_list(text)
    assert back.n == g.n and back.edges == g.edges
    head = text.splitlines()[0].split()
    assert head == [str(g.n), str(len(g.edges))]


def test_edge_list_rejects_disconnected():
    with pytest.raises(ValueError):
        graph_from_edge_list("4 2\n1 2\n3 4\n")


def test_matrix_csv_round_trip_exact():
    w = metropolis_weights(gen_erdos_renyi(8, 0.5, seed=9))
    back = matrix_from_csv(mixing_matrix_to_csv(w))
    assert np.array_equal(back, w.w)
    again = MixingMatrix.from_dense(back)
    assert again.rho == pytest.approx(w.rho, abs=1e-12)


def test_from_dense_rejects_bad_matrices():
    with pytest.raises(ValueError):
        MixingMatrix.from_dense(np.array([[0.5, 0.6], [0.6, 0.5]]))  # rows sum past 1
    with pytest.raises(ValueError):
        MixingMatrix.from_dense(np.eye(3))  # rho = 1
