import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finitewsn.grid_model import (
    DeflatedRadiusError,
    GridSpec,
    VirtualGrid,
    asymptotic_klb_thresholds,
    grid_bounds,
    grid_breakpoints,
    grid_cov_lower,
    grid_cov_upper,
    grid_positions,
    grid_side,
    klb_baseline,
    neighbor_count,
    neighbor_counts,
)
from finitewsn.simulator import is_k_covered

from oracles import all_subsets, cover_matrix, pattern_weights, target_depths

squares = st.sampled_from([1, 4, 9, 16, 25, 36, 49, 64, 81, 100, 144])


def test_grid_side():
    assert grid_side(100) == 10
    for bad in (0, -4, 99, 2):
        with pytest.raises(ValueError):
            grid_side(bad)


def test_positions_cell_centred():
    pts = grid_positions(100)
    assert pts.shape == (100, 2)
    assert pts.min() == pytest.approx(-0.45) and pts.max() == pytest.approx(0.45)
    gaps = np.diff(np.unique(pts[:, 0]))
    np.testing.assert_allclose(gaps, 0.1)


def test_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(10, 0.5, 0.1)
    with pytest.raises(ValueError):
        GridSpec(100, 1.5, 0.1)
    with pytest.raises(ValueError):
        GridSpec(100, 0.5, -0.1)


@given(squares, st.floats(0, 1.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_neighbor_counts_brute_force(n, r, x, y):
    pts = grid_positions(n)
    brute = int(np.sum(((pts - [x, y]) ** 2).sum(1) <= r * r + 1e-12))
    assert neighbor_count(n, r, (x, y)) == brute


@given(squares, st.floats(0, 1.0), st.floats(0, 1.0))
def test_neighbor_counts_monotone(n, r1, r2):
    lo, hi = sorted((r1, r2))
    q = np.linspace(-0.5, 0.5, 7)
    assert np.all(neighbor_counts(n, lo, q, q[::-1]) <= neighbor_counts(n, hi, q, q[::-1]))


def test_breakpoints_first_values():
    bp = grid_breakpoints(100)
    want = [0.1, math.sqrt(2) / 10, 0.2, math.sqrt(5) / 10, math.sqrt(8) / 10, 0.3]
    np.testing.assert_allclose(bp.values[:6], want, rtol=1e-15)
    assert list(bp.sums[:6]) == [1, 2, 4, 5, 8, 9]
    assert np.all(np.diff(bp.values) > 0)
    assert bp.values[-2] <= math.sqrt(2) / 2 < bp.values[-1]


@given(squares)
def test_breakpoints_are_lattice_distances(n):
    pts = grid_positions(n)
    if n == 1:
        return
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    realized = np.unique(np.round(d[d > 0], 12))
    bp = grid_breakpoints(n).values
    np.testing.assert_allclose(bp[: len(realized)], realized[: len(bp)], atol=1e-12)


def test_interval_index():
    bp = grid_breakpoints(100)
    assert bp.interval_index(0.05) == -1
    assert bp.interval_index(0.1) == 0
    assert bp.interval_index(0.14) == 0
    assert bp.interval_index(math.sqrt(2) / 10) == 1


def test_klb_thresholds_value():
    lo, hi = asymptotic_klb_thresholds(100, 0.2, 0.1)
    assert round(lo, 3) == 0.207 and round(hi, 3) == 0.229
    with pytest.raises(ValueError):
        asymptotic_klb_thresholds(4, 0.2, 0.1)


def test_klb_baseline():
    assert klb_baseline(0.25, 100, 0.2) == 1.0
    assert klb_baseline(0.2, 100, 0.2) == 0.0
    assert klb_baseline(0.22, 100, 0.2) is None


def test_virtual_grid():
    vg = VirtualGrid.for_radius(0.3)
    assert vg.deflated_radius >= 0.15 - 1e-12
    assert VirtualGrid.for_radius(0.3, 9).deflated_radius == pytest.approx(0.3 - 1 / math.sqrt(18))
    with pytest.raises(DeflatedRadiusError):
        VirtualGrid.for_radius(0.1, 4)
    with pytest.raises(ValueError):
        VirtualGrid.for_radius(0.3, 10)


@given(
    st.sampled_from([25, 49, 100]),
    st.floats(0.05, 1.0),
    st.floats(0.1, 0.8),
    st.integers(1, 3),
)
def test_bounds_ordered(n, p, r, k):
    rep = grid_bounds(GridSpec(n, p, r), k)
    assert 0.0 <= rep.upper <= 1.0
    if rep.lower is not None:
        assert 0.0 <= rep.lower <= rep.upper + 1e-12


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.15, 0.6))
def test_bounds_monotone_in_p(p1, p2, r):
    lo, hi = sorted((p1, p2))
    a, b = GridSpec(100, lo, r), GridSpec(100, hi, r)
    assert grid_cov_lower(a) <= grid_cov_lower(b) + 1e-15
    assert grid_cov_upper(a) <= grid_cov_upper(b) + 1e-15


def test_bounds_k_monotone():
    s = GridSpec(100, 0.4, 0.35)
    assert grid_cov_lower(s, 2) <= grid_cov_lower(s, 1)
    assert grid_cov_upper(s, 2) <= grid_cov_upper(s, 1)


def test_full_activation_deterministic():
    # with every sensor on, the virtual-grid bound is 1 whenever each test point is reached
    assert grid_cov_lower(GridSpec(100, 1.0, 0.3)) == 1.0
    assert grid_cov_upper(GridSpec(100, 1.0, 0.3)) == 1.0


def exact_grid_coverage(n, p, r, k):
    """Exact k-coverage probability by enumerating every activation pattern."""
    pos = grid_positions(n)
    masks = all_subsets(n)
    w = pattern_weights(masks, p)
    covered = np.array([is_k_covered(pos[m], r, k) if m.sum() >= k else False for m in masks])
    return float(w[covered].sum())


@pytest.mark.parametrize(
    "n,p,r,k",
    [(9, 0.5, 0.4, 1), (9, 0.8, 0.35, 1), (9, 0.7, 0.6, 2), (16, 0.6, 0.3, 1), (16, 0.85, 0.4, 2)],
)
def test_bounds_sandwich_exact_enumeration(n, p, r, k):
    exact = exact_grid_coverage(n, p, r, k)
    spec = GridSpec(n, p, r)
    assert grid_cov_lower(spec, k) <= exact + 1e-12
    assert exact <= grid_cov_upper(spec, k) + 1e-12


@pytest.mark.parametrize("n,l,p,r", [(9, 4, 0.5, 0.5), (16, 9, 0.7, 0.4), (16, 4, 0.3, 0.6)])
def test_lower_bound_equals_product_of_marginals(n, l, p, r):
    vg = VirtualGrid.for_radius(r, l)
    cover = cover_matrix(grid_positions(n), vg.points, vg.deflated_radius)
    masks = all_subsets(n)
    w = pattern_weights(masks, p)
    marg = [(w * (target_depths(masks, cover)[:, t] >= 1)).sum() for t in range(l)]
    assert grid_cov_lower(GridSpec(n, p, r), 1, vg) == pytest.approx(float(np.prod(marg)), rel=1e-12)


@given(st.floats(0.05, 0.95), st.floats(0.1, 0.9), st.integers(1, 3))
def test_bounds_sandwich_exact_enumeration_property(p, r, k):
    exact = exact_grid_coverage(9, p, r, k)
    spec = GridSpec(9, p, r)
    assert grid_cov_lower(spec, k) <= exact + 1e-12
    assert exact <= grid_cov_upper(spec, k) + 1e-12
