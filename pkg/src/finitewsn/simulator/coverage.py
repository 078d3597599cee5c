"""Exact k-coverage of the unit square by equal closed disks.

The square is k-covered iff no point of it lies in fewer than ``k``
disks.  The depth (number of covering disks) is constant on the faces of
the arrangement formed by the circles and the square's edges, and every
face touches some vertex of that arrangement: a corner, a circle-edge
crossing or a circle-circle crossing.  So it suffices to inspect a small
neighbourhood of each vertex.

A vertex strictly inside ``k`` disks passes outright.  Otherwise every
circle and edge through it is collected, and a point at distance 1e-6
(less when another circle or edge passes closer) is probed along each
tangent direction and the bisector of each angular sector between
consecutive tangents.  Any probe inside the square with
closed-disk depth below ``k`` is returned as a witness.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .graph import cell_index

__all__ = ["coverage_depth", "is_k_covered", "k_coverage_witness"]

_ON_CIRCLE = 1e-9
_ON_EDGE = 1e-12
_PROBE = 1e-6
_H = 0.5
# cells have side >= r / _REACH, so a disk spans at most _REACH cells
_REACH = 2


@numba.njit(cache=True, inline="always")
def _depth(qx, qy, r2, strict, stop, sx, sy, m, start, hint):
    # sensors are stored cell by cell in (sx, sy); hint[0] remembers the
    # last sensor that ended a search early and is tried first
    c = 0
    if stop == 1:
        h = hint[0]
        dx = sx[h] - qx
        dy = sy[h] - qy
        d2 = dx * dx + dy * dy
        if d2 < r2 or (not strict and d2 == r2):
            return 1
    cx = min(max(int((qx + _H) * m), 0), m - 1)
    cy = min(max(int((qy + _H) * m), 0), m - 1)
    # own cell first: with side r/2 its sensors are all within r/sqrt(2)
    own = cx * m + cy
    for b in range(start[own], start[own + 1]):
        dx = sx[b] - qx
        dy = sy[b] - qy
        d2 = dx * dx + dy * dy
        if d2 < r2 or (not strict and d2 == r2):
            c += 1
            if c >= stop:
                hint[0] = b
                return c
    for gx in range(max(cx - _REACH, 0), min(cx + _REACH, m - 1) + 1):
        for gy in range(max(cy - _REACH, 0), min(cy + _REACH, m - 1) + 1):
            cell = gx * m + gy
            if cell == own:
                continue
            for b in range(start[cell], start[cell + 1]):
                dx = sx[b] - qx
                dy = sy[b] - qy
                d2 = dx * dx + dy * dy
                if d2 < r2 or (not strict and d2 == r2):
                    c += 1
                    if c >= stop:
                        hint[0] = b
                        return c
    return c


@numba.njit(cache=True, inline="always")
def _strictly_deep(vx, vy, r, k, sx, sy, m, start, hint):
    inner = r - _ON_CIRCLE
    return inner > 0.0 and _depth(vx, vy, inner * inner, True, k, sx, sy, m, start, hint) >= k


@numba.njit(cache=True)
def _check_vertex(vx, vy, r, k, xs, ys, m, start, hint, angs):
    if _strictly_deep(vx, vy, r, k, xs, ys, m, start, hint):
        return True, vx, vy
    na = 0
    # the probe must stay closer than any circle or edge not through the vertex
    gap = _PROBE
    cx = min(max(int((vx + _H) * m), 0), m - 1)
    cy = min(max(int((vy + _H) * m), 0), m - 1)
    reach = _REACH + 1
    for gx in range(max(cx - reach, 0), min(cx + reach, m - 1) + 1):
        for gy in range(max(cy - reach, 0), min(cy + reach, m - 1) + 1):
            cell = gx * m + gy
            for b in range(start[cell], start[cell + 1]):
                dx = vx - xs[b]
                dy = vy - ys[b]
                off = abs(math.sqrt(dx * dx + dy * dy) - r)
                if off <= _ON_CIRCLE:
                    th = math.atan2(dy, dx)
                    angs[na] = th + 0.5 * math.pi
                    angs[na + 1] = th - 0.5 * math.pi
                    na += 2
                elif off < 2.0 * gap:
                    gap = 0.5 * off
    for c in (vx, vy):
        off = _H - abs(c)
        if _ON_EDGE < off < 2.0 * gap:
            gap = 0.5 * off
    if abs(abs(vx) - _H) <= _ON_EDGE:
        angs[na] = 0.5 * math.pi
        angs[na + 1] = -0.5 * math.pi
        na += 2
    if abs(abs(vy) - _H) <= _ON_EDGE:
        angs[na] = 0.0
        angs[na + 1] = math.pi
        na += 2
    r2 = r * r
    if na == 0:
        if _depth(vx, vy, r2, False, k, xs, ys, m, start, hint) < k:
            return False, vx, vy
        return True, vx, vy
    a = np.sort(np.mod(angs[:na], 2.0 * math.pi))
    lim = _H + _ON_EDGE
    for i in range(na):
        nxt = a[i + 1] if i + 1 < na else a[0] + 2.0 * math.pi
        for h in range(2):
            th = a[i] if h == 0 else 0.5 * (a[i] + nxt)
            qx = vx + gap * math.cos(th)
            qy = vy + gap * math.sin(th)
            if abs(qx) > lim or abs(qy) > lim:
                continue
            if _depth(qx, qy, r2, False, k, xs, ys, m, start, hint) < k:
                return False, qx, qy
    return True, vx, vy


@numba.njit(cache=True)
def k_cover_kernel(xs, ys, r, k):
    """Return ``(covered, wx, wy)``; when not covered ``(wx, wy)`` has depth < k."""
    n = xs.shape[0]
    if k <= 0:
        return True, 0.0, 0.0
    if n < k or r <= 0.0:
        return False, _H, _H
    m, start, order = cell_index(xs, ys, r / _REACH)
    sx = np.empty(n)
    sy = np.empty(n)
    for a in range(n):
        sx[a] = xs[order[a]]
        sy[a] = ys[order[a]]
    hint = np.zeros(1, dtype=np.int64)
    angs = np.empty(2 * n + 4)
    # corners first: cheap and the most common failure
    for ex in (-_H, _H):
        for ey in (-_H, _H):
            ok, wx, wy = _check_vertex(ex, ey, r, k, sx, sy, m, start, hint, angs)
            if not ok:
                return False, wx, wy
    r2 = r * r
    # circle-edge crossings
    for i in range(n):
        for axis in range(2):
            c = sx[i] if axis == 0 else sy[i]
            o = sy[i] if axis == 0 else sx[i]
            for side in (-_H, _H):
                g = r2 - (side - c) ** 2
                if g < 0.0:
                    continue
                h = math.sqrt(g)
                for sgn in (-1.0, 1.0):
                    t = o + sgn * h
                    if abs(t) > _H:
                        continue
                    if axis == 0:
                        ok, wx, wy = _check_vertex(side, t, r, k, sx, sy, m, start, hint, angs)
                    else:
                        ok, wx, wy = _check_vertex(t, side, r, k, sx, sy, m, start, hint, angs)
                    if not ok:
                        return False, wx, wy
                    if h == 0.0:
                        break
    # circle-circle crossings
    lim = _H + _ON_EDGE
    for i in range(n):
        cx = min(max(int((sx[i] + _H) * m), 0), m - 1)
        cy = min(max(int((sy[i] + _H) * m), 0), m - 1)
        for gx in range(max(cx - 2 * _REACH, 0), min(cx + 2 * _REACH, m - 1) + 1):
            for gy in range(max(cy - 2 * _REACH, 0), min(cy + 2 * _REACH, m - 1) + 1):
                cell = gx * m + gy
                for j in range(max(start[cell], i + 1), start[cell + 1]):
                    dx = sx[j] - sx[i]
                    dy = sy[j] - sy[i]
                    d2 = dx * dx + dy * dy
                    if d2 == 0.0 or d2 > 4.0 * r2:
                        continue
                    d = math.sqrt(d2)
                    hh = r2 - 0.25 * d2
                    h = math.sqrt(hh) if hh > 0.0 else 0.0
                    mx = sx[i] + 0.5 * dx
                    my = sy[i] + 0.5 * dy
                    ux = -dy / d
                    uy = dx / d
                    for sgn in (1.0, -1.0):
                        px = mx + sgn * h * ux
                        py = my + sgn * h * uy
                        if (
                            abs(px) <= lim
                            and abs(py) <= lim
                            and not _strictly_deep(px, py, r, k, sx, sy, m, start, hint)
                        ):
                            ok, wx, wy = _check_vertex(px, py, r, k, sx, sy, m, start, hint, angs)
                            if not ok:
                                return False, wx, wy
                        if h == 0.0:
                            break
    return True, 0.0, 0.0


def _split(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])


def k_coverage_witness(points, r: float, k: int = 1):
    """A point of the square covered by fewer than ``k`` disks, or None."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    xs, ys = _split(points)
    ok, wx, wy = k_cover_kernel(xs, ys, float(r), int(k))
    return None if ok else (float(wx), float(wy))


def is_k_covered(points, r: float, k: int = 1) -> bool:
    """Whether closed disks of radius ``r`` at ``points`` cover the unit square ``k`` times."""
    return k_coverage_witness(points, r, k) is None


def coverage_depth(points, r: float, qx, qy) -> np.ndarray:
    """Number of closed disks containing each query point (brute force)."""
    xs, ys = _split(points)
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    out = np.zeros(np.broadcast(qx, qy).shape, dtype=np.int64)
    r2 = r * r
    for x, y in zip(xs, ys):
        out += ((qx - x) ** 2 + (qy - y) ** 2 <= r2)
    return out
