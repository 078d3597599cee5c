"""Planar geometry on the closed unit square centred at the origin.

The square ``S0 = [-0.5, 0.5] x [-0.5, 0.5]`` is the deployment region for
every model in this package.  The central quantity is the clipped disk area
``nu(B(c, r)) = area(B(c, r) & S0)``, which the random-deployment integrands
evaluate hundreds of thousands of times, so it is provided both as a scalar
closed form and as a numba ufunc over arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

__all__ = [
    "EPS_GEO",
    "HALF",
    "CoincidentCirclesError",
    "Disk",
    "LensEstimate",
    "Point",
    "UnitSquare",
    "circle_pair_intersections",
    "circle_square_intersections",
    "clipped_disk_area",
    "clipped_disk_areas",
    "clipped_lens_area",
    "clipped_lens_area_exact",
    "distance",
]

#: tolerance for tangency and on-boundary classification
EPS_GEO = 1e-12
HALF = 0.5


class Point(NamedTuple):
    x: float
    y: float

    @property
    def in_square(self) -> bool:
        """True when the point lies in the closed unit square (within EPS_GEO)."""
        return abs(self.x) <= HALF + EPS_GEO and abs(self.y) <= HALF + EPS_GEO


class UnitSquare:
    """The closed unit square centred at the origin.  Side 1, area 1."""

    side = 1.0
    area = 1.0
    corners = (Point(HALF, HALF), Point(-HALF, HALF), Point(-HALF, -HALF), Point(HALF, -HALF))

    @staticmethod
    def contains(p: Point, tol: float = EPS_GEO) -> bool:
        return abs(p[0]) <= HALF + tol and abs(p[1]) <= HALF + tol


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self):
        if not (self.radius >= 0.0):
            raise ValueError(f"disk radius must be >= 0, got {self.radius!r}")
        c = self.center
        if not (math.isfinite(c[0]) and math.isfinite(c[1])):
            raise ValueError(f"disk center must be finite, got {c!r}")
        object.__setattr__(self, "center", Point(float(c[0]), float(c[1])))


class CoincidentCirclesError(ValueError):
    """Two circles coincide, so their boundaries meet in infinitely many points."""


class LensEstimate(NamedTuple):
    area: float
    stderr: float


def distance(u, v) -> float:
    return math.hypot(u[0] - v[0], u[1] - v[1])


# ---------------------------------------------------------------------------
# clipped disk area (closed form)
#
# Phi(x, y) = signed area of disk(0, r) & [0, x] x [0, y].  It is odd in each
# argument, so any axis-aligned rectangle is an inclusion-exclusion of four
# Phi values taken at its corners relative to the disk centre.


@numba.njit(cache=True, inline="always")
def _circ_primitive(t, r):
    # integral_0^t sqrt(r^2 - s^2) ds, for 0 <= t <= r
    u = min(t / r, 1.0)
    return 0.5 * (t * math.sqrt(max(r * r - t * t, 0.0)) + r * r * math.asin(u))


@numba.njit(cache=True)
def _quadrant_box(x, y, r):
    # area of disk(0, r) & [0, x] x [0, y] for x, y >= 0
    x = min(x, r)
    y = min(y, r)
    if x <= 0.0 or y <= 0.0:
        return 0.0
    if x * x + y * y <= r * r:
        return x * y
    xs = math.sqrt(max(r * r - y * y, 0.0))
    return y * xs + _circ_primitive(x, r) - _circ_primitive(xs, r)


@numba.njit(cache=True, inline="always")
def _phi(x, y, r):
    s = 1.0
    if x < 0.0:
        s = -s
        x = -x
    if y < 0.0:
        s = -s
        y = -y
    return s * _quadrant_box(x, y, r)


@numba.njit(cache=True)
def nu_scalar(cx, cy, r):
    """Area of the closed disk B((cx, cy), r) inside the unit square."""
    if r <= 0.0:
        return 0.0
    full = math.pi * r * r
    ax = abs(cx)
    ay = abs(cy)
    if ax + r <= HALF and ay + r <= HALF:
        return full
    # farthest corner inside the disk -> the whole square is covered
    fx = ax + HALF
    fy = ay + HALF
    if fx * fx + fy * fy <= r * r:
        return 1.0
    x0 = -HALF - cx
    x1 = HALF - cx
    y0 = -HALF - cy
    y1 = HALF - cy
    a = _phi(x1, y1, r) - _phi(x0, y1, r) - _phi(x1, y0, r) + _phi(x0, y0, r)
    if a < 0.0:
        return 0.0
    return min(a, full, 1.0)


@numba.vectorize(["float64(float64, float64, float64)"], cache=True)
def clipped_disk_areas(cx, cy, r):
    """Vectorised clipped disk area over arrays of centres (and radii)."""
    return nu_scalar(cx, cy, r)


def clipped_disk_area(d: Disk) -> float:
    return float(nu_scalar(d.center[0], d.center[1], d.radius))


# ---------------------------------------------------------------------------
# exact area of two equal disks and the square (Green's theorem on the boundary)


@numba.njit(cache=True, inline="always")
def _in_square(x, y):
    return abs(x) <= HALF and abs(y) <= HALF


@numba.njit(cache=True)
def _circle_arc_part(ax, ay, bx, by, r):
    # sum of 0.5 * (x dy - y dx) over arcs of circle a lying inside disk b and the square
    angles = np.empty(10)
    m = 0
    dx = bx - ax
    dy = by - ay
    d = math.sqrt(dx * dx + dy * dy)
    if 0.0 < d < 2.0 * r:
        phi = math.atan2(dy, dx)
        alpha = math.acos(d / (2.0 * r))
        angles[m] = phi + alpha
        angles[m + 1] = phi - alpha
        m += 2
    for s in (-HALF, HALF):
        c = (s - ax) / r
        if -1.0 < c < 1.0:
            t = math.acos(c)
            angles[m] = t
            angles[m + 1] = -t
            m += 2
        c = (s - ay) / r
        if -1.0 < c < 1.0:
            t = math.asin(c)
            angles[m] = t
            angles[m + 1] = math.pi - t
            m += 2
    two_pi = 2.0 * math.pi
    total = 0.0
    if m == 0:
        px = ax + r
        py = ay
        if _in_square(px, py) and (px - bx) ** 2 + (py - by) ** 2 <= r * r:
            total = math.pi * r * r + 0.0
        return total
    a = angles[:m] % two_pi
    a.sort()
    for i in range(m):
        t0 = a[i]
        t1 = a[i + 1] if i + 1 < m else a[0] + two_pi
        if t1 - t0 <= 0.0:
            continue
        tm = 0.5 * (t0 + t1)
        px = ax + r * math.cos(tm)
        py = ay + r * math.sin(tm)
        if _in_square(px, py) and (px - bx) ** 2 + (py - by) ** 2 <= r * r:
            total += 0.5 * (
                r * r * (t1 - t0)
                + ax * r * (math.sin(t1) - math.sin(t0))
                - ay * r * (math.cos(t1) - math.cos(t0))
            )
    return total


@numba.njit(cache=True)
def _edge_part(ax, ay, bx, by, r):
    # sum of 0.5 * (x dy - y dx) over square-edge pieces inside both disks
    cxs = (-HALF, HALF, HALF, -HALF)
    cys = (-HALF, -HALF, HALF, HALF)
    total = 0.0
    ss = np.empty(6)
    for e in range(4):
        x0 = cxs[e]
        y0 = cys[e]
        x1 = cxs[(e + 1) % 4]
        y1 = cys[(e + 1) % 4]
        ux = x1 - x0
        uy = y1 - y0
        m = 0
        ss[m] = 0.0
        m += 1
        for (qx, qy) in ((ax, ay), (bx, by)):
            wx = x0 - qx
            wy = y0 - qy
            bq = ux * wx + uy * wy
            cq = wx * wx + wy * wy - r * r
            disc = bq * bq - cq
            if disc > 0.0:
                sq = math.sqrt(disc)
                for s in (-bq - sq, -bq + sq):
                    if 0.0 < s < 1.0:
                        ss[m] = s
                        m += 1
        ss[m] = 1.0
        m += 1
        seg = ss[:m]
        seg.sort()
        for i in range(m - 1):
            s0 = seg[i]
            s1 = seg[i + 1]
            if s1 - s0 <= 0.0:
                continue
            sm = 0.5 * (s0 + s1)
            px = x0 + sm * ux
            py = y0 + sm * uy
            if (px - ax) ** 2 + (py - ay) ** 2 <= r * r and (px - bx) ** 2 + (py - by) ** 2 <= r * r:
                pax = x0 + s0 * ux
                pay = y0 + s0 * uy
                pbx = x0 + s1 * ux
                pby = y0 + s1 * uy
                total += 0.5 * (pax * pby - pbx * pay)
    return total


@numba.njit(cache=True)
def lens_scalar(ax, ay, bx, by, r):
    """Exact area of B(a, r) & B(b, r) & unit square."""
    if r <= 0.0:
        return 0.0
    dx = bx - ax
    dy = by - ay
    d2 = dx * dx + dy * dy
    if d2 >= 4.0 * r * r:
        return 0.0
    if d2 == 0.0:
        return nu_scalar(ax, ay, r)
    d = math.sqrt(d2)
    if (
        abs(ax) + r <= HALF
        and abs(ay) + r <= HALF
        and abs(bx) + r <= HALF
        and abs(by) + r <= HALF
    ):
        return 2.0 * r * r * math.acos(d / (2.0 * r)) - 0.5 * d * math.sqrt(4.0 * r * r - d2)
    area = (
        _circle_arc_part(ax, ay, bx, by, r)
        + _circle_arc_part(bx, by, ax, ay, r)
        + _edge_part(ax, ay, bx, by, r)
    )
    return max(area, 0.0)


def clipped_lens_area_exact(a: Disk, b: Disk) -> float:
    """Exact ``nu(B(a) & B(b))`` for equal radii."""
    if a.radius != b.radius:
        raise ValueError("lens area requires equal radii")
    return float(lens_scalar(a.center[0], a.center[1], b.center[0], b.center[1], a.radius))


def clipped_lens_area(a: Disk, b: Disk, samples: int = 100_000, seed: int = 0) -> LensEstimate:
    """Monte Carlo estimate of ``nu(B(a) & B(b))`` with its standard error.

    Points are drawn uniformly over the bounding box of the lens clipped to
    the square, so the estimator is unbiased and deterministic for a fixed
    ``seed``.
    """
    if a.radius != b.radius:
        raise ValueError("lens area requires equal radii")
    if samples <= 0:
        raise ValueError("samples must be positive")
    r = a.radius
    (ax, ay), (bx, by) = a.center, b.center
    if r == 0.0 or math.hypot(ax - bx, ay - by) > 2.0 * r:
        return LensEstimate(0.0, 0.0)
    x0 = max(ax - r, bx - r, -HALF)
    x1 = min(ax + r, bx + r, HALF)
    y0 = max(ay - r, by - r, -HALF)
    y1 = min(ay + r, by + r, HALF)
    if x1 <= x0 or y1 <= y0:
        return LensEstimate(0.0, 0.0)
    box = (x1 - x0) * (y1 - y0)
    rng = np.random.default_rng(seed)
    x = rng.uniform(x0, x1, samples)
    y = rng.uniform(y0, y1, samples)
    r2 = r * r
    hit = ((x - ax) ** 2 + (y - ay) ** 2 <= r2) & ((x - bx) ** 2 + (y - by) ** 2 <= r2)
    f = float(hit.mean())
    return LensEstimate(box * f, box * math.sqrt(f * (1.0 - f) / samples))


# ---------------------------------------------------------------------------
# boundary intersections


def circle_pair_intersections(a: Disk, b: Disk, eps: float = EPS_GEO) -> tuple[Point, ...]:
    """Points where the boundaries of two circles cross (0, 1 or 2 points)."""
    if a.radius <= 0.0 or b.radius <= 0.0:
        raise ValueError("circle radii must be positive")
    (ax, ay), (bx, by) = a.center, b.center
    ra, rb = a.radius, b.radius
    dx, dy = bx - ax, by - ay
    d = math.hypot(dx, dy)
    if d <= eps and abs(ra - rb) <= eps:
        raise CoincidentCirclesError("coincident circles intersect in infinitely many points")
    if d > ra + rb + eps or d < abs(ra - rb) - eps or d <= eps:
        return ()
    # distance from a's centre to the radical line, along the centre line
    along = (d * d + ra * ra - rb * rb) / (2.0 * d)
    h2 = ra * ra - along * along
    mx, my = ax + along * dx / d, ay + along * dy / d
    if abs(d - (ra + rb)) <= eps or abs(d - abs(ra - rb)) <= eps or h2 <= 0.0:
        return (Point(mx, my),)
    h = math.sqrt(h2)
    ox, oy = -dy * h / d, dx * h / d
    return (Point(mx + ox, my + oy), Point(mx - ox, my - oy))


def circle_square_intersections(d: Disk, eps: float = EPS_GEO) -> list[Point]:
    """Points where the circle crosses (or touches) the boundary of the square."""
    if d.radius <= 0.0:
        raise ValueError("circle radius must be positive")
    cx, cy = d.center
    r = d.radius
    out: list[Point] = []

    def add(p: Point) -> None:
        if abs(p.x) > HALF + eps or abs(p.y) > HALF + eps:
            return
        for q in out:
            if abs(q.x - p.x) <= 1e-9 and abs(q.y - p.y) <= 1e-9:
                return
        out.append(p)

    for s in (-HALF, HALF):
        # vertical edge x = s
        disc = r * r - (s - cx) ** 2
        if disc >= -eps:
            h = math.sqrt(max(disc, 0.0))
            if h <= 1e-9:
                add(Point(s, cy))
            else:
                add(Point(s, cy - h))
                add(Point(s, cy + h))
        # horizontal edge y = s
        disc = r * r - (s - cy) ** 2
        if disc >= -eps:
            h = math.sqrt(max(disc, 0.0))
            if h <= 1e-9:
                add(Point(cx, s))
            else:
                add(Point(cx - h, s))
                add(Point(cx + h, s))
    return out
