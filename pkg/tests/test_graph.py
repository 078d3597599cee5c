import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from finitewsn.simulator import (
    Graph,
    build_geometric_graph,
    is_connected,
    local_vertex_connectivity,
    vertex_connectivity_at_least,
)

from oracles import is_connected_after, k_connected_by_deletion

point_sets = st.integers(0, 60).flatmap(
    lambda n: arrays(np.float64, (n, 2), elements=st.floats(-0.5, 0.5))
)


def brute_edges(pts, r):
    n = len(pts)
    return {
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if ((pts[i] - pts[j]) ** 2).sum() <= r * r + 1e-12
    }


def edge_set(g):
    return {(int(u), int(v)) for u, v in g.edges}


@given(point_sets, st.floats(0.0, 1.5))
def test_edges_match_brute_force(pts, r):
    g = build_geometric_graph(pts, r)
    assert edge_set(g) == brute_edges(pts, r)
    assert all(u < v for u, v in g.edges)


@given(point_sets, st.floats(0.0, 0.8), st.floats(0.0, 0.8), st.floats(0.05, 1.0), st.integers(0, 2**63))
def test_link_coins_monotone_coupling(pts, r1, r2, p, seed):
    lo, hi = sorted((r1, r2))
    small = edge_set(build_geometric_graph(pts, lo, p, seed))
    big = edge_set(build_geometric_graph(pts, hi, p, seed))
    assert small <= big
    assert big <= brute_edges(pts, hi)
    # coins are a function of the pair only
    assert small == big & brute_edges(pts, lo)


def test_link_probability_frequency():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 0.5, (300, 2))
    full = len(build_geometric_graph(pts, 0.3).edges)
    kept = len(build_geometric_graph(pts, 0.3, 0.3, seed=5).edges)
    sd = np.sqrt(full * 0.3 * 0.7)
    assert abs(kept - 0.3 * full) <= 5 * sd


def test_graph_validation():
    with pytest.raises(ValueError):
        build_geometric_graph([[0, 0]], 0.1, p=0.0)
    with pytest.raises(ValueError):
        build_geometric_graph([[0, 0]], -0.1)
    with pytest.raises(ValueError):
        build_geometric_graph(np.zeros((3, 3)), 0.1)


def random_graph(rng, n, density):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < density]
    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return Graph(positions=np.zeros((n, 2)), edges=arr)


@given(st.integers(1, 10), st.floats(0.0, 1.0), st.integers(0, 10_000))
def test_connectivity_matches_search(n, density, seed):
    g = random_graph(np.random.default_rng(seed), n, density)
    assert is_connected(g) == is_connected_after(g.adjacency(), set())


@given(st.integers(1, 9), st.floats(0.2, 1.0), st.integers(0, 10_000))
def test_vertex_connectivity_matches_deletion_oracle(n, density, seed):
    g = random_graph(np.random.default_rng(seed), n, density)
    adj = g.adjacency()
    for k in range(1, n + 1):
        assert vertex_connectivity_at_least(g, k) == k_connected_by_deletion(adj, k), (k, g.edges.tolist())


def test_complete_and_cycle():
    n = 7
    complete = Graph(np.zeros((n, 2)), np.array(list(itertools.combinations(range(n), 2))))
    assert vertex_connectivity_at_least(complete, n - 1)
    assert not vertex_connectivity_at_least(complete, n)
    cycle = Graph(np.zeros((n, 2)), np.array([(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]))
    assert vertex_connectivity_at_least(cycle, 2)
    assert not vertex_connectivity_at_least(cycle, 3)


def test_degenerate_graphs():
    empty = Graph(np.zeros((0, 2)), np.zeros((0, 2), dtype=np.int64))
    single = Graph(np.zeros((1, 2)), np.zeros((0, 2), dtype=np.int64))
    assert is_connected(empty) and is_connected(single)
    assert not vertex_connectivity_at_least(single, 1)
    assert not vertex_connectivity_at_least(single, 2)
    with pytest.raises(ValueError):
        vertex_connectivity_at_least(single, 0)


def min_separator(adj, s, t):
    others = [v for v in range(len(adj)) if v not in (s, t)]
    for size in range(len(others) + 1):
        for cut in itertools.combinations(others, size):
            removed = set(cut)
            seen, stack = {s}, [s]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in removed and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if t not in seen:
                return size
    raise AssertionError("adjacent endpoints have no separator")


@given(st.integers(3, 9), st.floats(0.2, 0.9), st.integers(0, 10_000))
def test_local_connectivity_menger(n, density, seed):
    g = random_graph(np.random.default_rng(seed), n, density)
    adj = g.adjacency()
    for s, t in itertools.combinations(range(n), 2):
        if t not in adj[s]:
            assert local_vertex_connectivity(g, s, t) == min_separator(adj, s, t)
