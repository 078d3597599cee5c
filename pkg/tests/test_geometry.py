import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finitewsn.geometry import (
    CoincidentCirclesError,
    Disk,
    Point,
    UnitSquare,
    circle_pair_intersections,
    circle_square_intersections,
    clipped_disk_area,
    clipped_disk_areas,
    clipped_lens_area,
    clipped_lens_area_exact,
)

coord = st.floats(-0.5, 0.5)
radius = st.floats(0.0, 1.6)


def chord_oracle(cx, cy, r):
    """Clipped area by 1-D mpmath integration of vertical chord lengths."""
    mpmath.mp.dps = 30
    a, b = max(-0.5, cx - r), min(0.5, cx + r)
    if r == 0 or a >= b:
        return 0.0

    def chord(x):
        h2 = r * r - (x - cx) ** 2
        if h2 <= 0:
            return mpmath.mpf(0)
        h = mpmath.sqrt(h2)
        return max(mpmath.mpf(0), min(mpmath.mpf(0.5), cy + h) - max(mpmath.mpf(-0.5), cy - h))

    knots = {a, b, cx}
    for edge in (-0.5, 0.5):
        d = edge - cy
        if abs(d) < r:
            w = math.sqrt(r * r - d * d)
            knots.update(x for x in (cx - w, cx + w) if a < x < b)
    return float(mpmath.quad(chord, sorted(knots)))


@pytest.mark.parametrize(
    "cx,cy,r",
    [(0.0, 0.0, 0.1), (0.5, 0.5, 0.3), (0.3, -0.45, 0.2), (0.0, 0.0, 0.6), (0.1, 0.2, 0.9), (-0.5, 0.1, 1.2)],
)
def test_clipped_area_matches_quadrature_oracle(cx, cy, r):
    assert clipped_disk_area(Disk(Point(cx, cy), r)) == pytest.approx(chord_oracle(cx, cy, r), abs=1e-12)


@given(coord, coord, st.floats(0.01, 1.5))
def test_clipped_area_oracle_property(cx, cy, r):
    assert clipped_disk_area(Disk(Point(cx, cy), r)) == pytest.approx(chord_oracle(cx, cy, r), abs=1e-10)


def test_closed_forms():
    assert clipped_disk_area(Disk(Point(0, 0), 0.2)) == pytest.approx(math.pi * 0.04, abs=1e-15)
    assert clipped_disk_area(Disk(Point(0.5, 0.5), 0.4)) == pytest.approx(math.pi * 0.04, abs=1e-15)
    assert clipped_disk_area(Disk(Point(0.5, 0.0), 0.3)) == pytest.approx(math.pi * 0.045, abs=1e-15)
    assert clipped_disk_area(Disk(Point(0, 0), math.sqrt(0.5))) == pytest.approx(1.0, abs=1e-15)
    assert clipped_disk_area(Disk(Point(0.5, 0.5), math.sqrt(2))) == pytest.approx(1.0, abs=1e-15)
    assert clipped_disk_area(Disk(Point(0.2, 0.1), 0.0)) == 0.0


@given(coord, coord, radius)
def test_area_range(cx, cy, r):
    a = clipped_disk_area(Disk(Point(cx, cy), r))
    assert -1e-15 <= a <= min(1.0, math.pi * r * r) + 1e-12


@given(coord, coord, radius, radius)
def test_area_monotone_in_radius(cx, cy, r1, r2):
    lo, hi = sorted((r1, r2))
    assert clipped_disk_area(Disk(Point(cx, cy), lo)) <= clipped_disk_area(Disk(Point(cx, cy), hi)) + 1e-12


@given(coord, coord, radius)
def test_area_square_symmetry(cx, cy, r):
    base = clipped_disk_area(Disk(Point(cx, cy), r))
    for x, y in ((-cx, cy), (cx, -cy), (cy, cx), (-cy, -cx)):
        assert clipped_disk_area(Disk(Point(x, y), r)) == pytest.approx(base, abs=1e-12)


def test_vectorised_matches_scalar():
    rng = np.random.default_rng(3)
    cx, cy = rng.uniform(-0.5, 0.5, (2, 500))
    r = rng.uniform(0, 1, 500)
    vec = clipped_disk_areas(cx, cy, r)
    ref = [clipped_disk_area(Disk(Point(a, b), c)) for a, b, c in zip(cx, cy, r)]
    np.testing.assert_allclose(vec, ref, rtol=0, atol=0)


def rejection_area(cx, cy, r, samples, rng):
    """Hit-or-miss estimate of the clipped area over the clipped bounding box."""
    x0, x1 = max(-0.5, cx - r), min(0.5, cx + r)
    y0, y1 = max(-0.5, cy - r), min(0.5, cy + r)
    box = max(x1 - x0, 0.0) * max(y1 - y0, 0.0)
    x = rng.uniform(x0, x1, samples)
    y = rng.uniform(y0, y1, samples)
    frac = np.mean((x - cx) ** 2 + (y - cy) ** 2 <= r * r)
    return box * frac, box


def test_clipped_area_rejection_sampling_small():
    rng = np.random.default_rng(11)
    z = []
    for _ in range(300):
        cx, cy = rng.uniform(-0.5, 0.5, 2)
        r = rng.uniform(0.01, 0.9)
        exact = clipped_disk_area(Disk(Point(cx, cy), r))
        est, box = rejection_area(cx, cy, r, 20_000, rng)
        q = exact / box
        sigma = box * math.sqrt(max(q * (1 - q), 0.0) / 20_000)
        z.append(abs(est - exact) / sigma if sigma > 0 else 0.0)
    assert max(z) < 5.0


def test_disk_validation():
    with pytest.raises(ValueError):
        Disk(Point(0, 0), -0.1)
    with pytest.raises(ValueError):
        Disk(Point(math.nan, 0), 0.1)


def test_square_contains():
    assert UnitSquare.contains(Point(0.5, -0.5))
    assert not UnitSquare.contains(Point(0.5 + 1e-9, 0))
    assert UnitSquare.area == 1.0


@given(coord, coord, coord, coord, st.floats(0.01, 0.8))
def test_circle_pair_points_lie_on_both(ax, ay, bx, by, r):
    a, b = Disk(Point(ax, ay), r), Disk(Point(bx, by), r)
    if math.hypot(ax - bx, ay - by) < 1e-9:
        return
    pts = circle_pair_intersections(a, b)
    d = math.hypot(ax - bx, ay - by)
    assert len(pts) == (2 if d < 2 * r - 1e-9 else len(pts))
    for p in pts:
        assert math.hypot(p.x - ax, p.y - ay) == pytest.approx(r, abs=1e-9)
        assert math.hypot(p.x - bx, p.y - by) == pytest.approx(r, abs=1e-9)


def test_circle_pair_special_cases():
    a = Disk(Point(0, 0), 0.2)
    (t,) = circle_pair_intersections(a, Disk(Point(0.4, 0), 0.2))
    assert t == pytest.approx((0.2, 0.0), abs=1e-15)
    assert circle_pair_intersections(a, Disk(Point(0.5, 0), 0.2)) == ()
    with pytest.raises(CoincidentCirclesError):
        circle_pair_intersections(a, Disk(Point(0, 0), 0.2))


@given(coord, coord, st.floats(0.01, 1.0))
def test_circle_square_points(cx, cy, r):
    for p in circle_square_intersections(Disk(Point(cx, cy), r)):
        assert math.hypot(p.x - cx, p.y - cy) == pytest.approx(r, abs=1e-9)
        assert max(abs(p.x), abs(p.y)) == pytest.approx(0.5, abs=1e-12)


def test_circle_square_count():
    assert len(circle_square_intersections(Disk(Point(0, 0), 0.1))) == 0
    assert len(circle_square_intersections(Disk(Point(0, 0), 0.6))) == 8
    assert len(circle_square_intersections(Disk(Point(0.5, 0.5), 0.3))) == 2


@given(coord, coord, coord, coord, st.floats(0.01, 0.8))
def test_lens_bounds(ax, ay, bx, by, r):
    a, b = Disk(Point(ax, ay), r), Disk(Point(bx, by), r)
    lens = clipped_lens_area_exact(a, b)
    assert -1e-12 <= lens <= min(clipped_disk_area(a), clipped_disk_area(b)) + 1e-12
    assert lens == pytest.approx(clipped_lens_area_exact(b, a), abs=1e-12)


def test_lens_special_cases():
    a = Disk(Point(0.1, -0.2), 0.3)
    assert clipped_lens_area_exact(a, a) == pytest.approx(clipped_disk_area(a), abs=1e-12)
    assert clipped_lens_area_exact(a, Disk(Point(-0.5, 0.5), 0.3)) == 0.0
    # two interior disks at distance d: 2 r^2 acos(d/2r) - (d/2) sqrt(4r^2 - d^2)
    r, d = 0.15, 0.1
    lens = 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)
    got = clipped_lens_area_exact(Disk(Point(0, 0), r), Disk(Point(d, 0), r))
    assert got == pytest.approx(lens, abs=1e-13)


@pytest.mark.parametrize("seed", range(6))
def test_lens_exact_vs_monte_carlo(seed):
    rng = np.random.default_rng(seed)
    ax, ay, bx, by = rng.uniform(-0.5, 0.5, 4)
    r = max(0.6 * math.hypot(ax - bx, ay - by), 0.05)
    a, b = Disk(Point(ax, ay), r), Disk(Point(bx, by), r)
    mc = clipped_lens_area(a, b, 200_000, seed)
    assert abs(mc.area - clipped_lens_area_exact(a, b)) <= 4 * mc.stderr + 1e-12
    assert clipped_lens_area(a, b, 200_000, seed) == mc
