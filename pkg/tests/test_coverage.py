import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from finitewsn.simulator import coverage_depth, is_k_covered, k_coverage_witness

from oracles import fine_grid, grid_depth

point_sets = st.integers(1, 40).flatmap(lambda n: arrays(np.float64, (n, 2), elements=st.floats(-0.5, 0.5)))


def test_single_disk_exact_threshold():
    c = [[0.0, 0.0]]
    assert is_k_covered(c, math.sqrt(0.5) + 1e-12)
    assert not is_k_covered(c, math.sqrt(0.5) - 1e-7)


def test_quadrant_disks():
    pts = [[-0.25, -0.25], [-0.25, 0.25], [0.25, -0.25], [0.25, 0.25]]
    assert is_k_covered(pts, math.sqrt(2) / 4 + 1e-12)
    w = k_coverage_witness(pts, math.sqrt(2) / 4 - 1e-6)
    assert w is not None
    assert coverage_depth(pts, math.sqrt(2) / 4 - 1e-6, w[0], w[1]) == 0


def test_k_needs_k_points():
    assert not is_k_covered([[0.0, 0.0]], 2.0, k=2)
    assert is_k_covered([[0.0, 0.0], [0.1, 0.1]], 2.0, k=2)
    assert not is_k_covered(np.empty((0, 2)), 1.0)


def test_small_hole_found():
    # four disks leave a tiny gap at the centre that a coarse grid would miss
    r = 0.5
    off = r / math.sqrt(2) + 2e-5
    pts = [[x, y] for x in (-off, off) for y in (-off, off)]
    w = k_coverage_witness(pts, r * 1.0)
    assert w is not None
    assert coverage_depth(pts, r, w[0], w[1]) == 0


def test_validation():
    with pytest.raises(ValueError):
        is_k_covered([[0, 0]], 0.0)
    with pytest.raises(ValueError):
        is_k_covered([[0, 0]], 0.5, k=0)


@given(point_sets, st.floats(0.05, 0.8), st.integers(1, 3))
def test_witness_is_genuine(pts, r, k):
    w = k_coverage_witness(pts, r, k)
    if w is not None:
        assert max(abs(w[0]), abs(w[1])) <= 0.5 + 1e-9
        assert coverage_depth(pts, r, w[0], w[1]) < k


@given(point_sets, st.floats(0.05, 0.8), st.integers(1, 3))
def test_covered_implies_grid_covered(pts, r, k):
    if is_k_covered(pts, r, k):
        gx, gy = fine_grid(101)
        assert grid_depth(pts, r, gx, gy).min() >= k


@given(point_sets, st.floats(0.05, 0.8), st.floats(0.05, 0.8), st.integers(1, 3))
def test_monotone_in_radius(pts, r1, r2, k):
    lo, hi = sorted((r1, r2))
    if is_k_covered(pts, lo, k):
        assert is_k_covered(pts, hi, k)


@given(point_sets, point_sets, st.floats(0.05, 0.8), st.integers(1, 3))
def test_monotone_in_points_and_k(a, b, r, k):
    if is_k_covered(a, r, k):
        assert is_k_covered(np.vstack([a, b]), r, k)
        assert is_k_covered(a, r, max(k - 1, 1))


@given(point_sets, st.floats(0.05, 0.8))
def test_invariant_under_square_symmetries(pts, r):
    base = is_k_covered(pts, r)
    for t in (pts[:, ::-1], pts * [-1, 1], pts * [1, -1]):
        assert is_k_covered(np.ascontiguousarray(t), r) == base


def near_critical_configuration(rng):
    n = int(rng.integers(5, 60))
    k = int(rng.integers(1, 4))
    pts = rng.uniform(-0.5, 0.5, (n, 2))
    # radius close to the smallest covering radius, found by bisection
    lo, hi = 0.0, 1.5
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if is_k_covered(pts, mid, k) else (mid, hi)
    r = hi * rng.uniform(0.97, 1.03)
    return pts, r, k


def test_agrees_with_fine_grid_near_threshold():
    rng = np.random.default_rng(42)
    gx, gy = fine_grid(401)
    for _ in range(25):
        pts, r, k = near_critical_configuration(rng)
        uncovered = float(np.mean(grid_depth(pts, r, gx, gy) < k))
        w = k_coverage_witness(pts, r, k)
        if w is None:
            assert uncovered == 0.0
        else:
            assert coverage_depth(pts, r, w[0], w[1]) < k
            # a missed hole must be smaller than the grid can resolve
            assert uncovered > 0.0 or r < 1.5
