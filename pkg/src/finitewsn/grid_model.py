"""Unreliable sensor grids: lattice geometry, coverage bounds, breakpoints.

A grid of ``n = s * s`` sensors sits at the cell centres of an ``s x s``
partition of the unit square (spacing ``1/s``).  Every sensor is active
independently with probability ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np
from scipy.stats import binom

from .geometry import EPS_GEO

__all__ = [
    "BoundReport",
    "BreakpointSet",
    "DeflatedRadiusError",
    "GridSpec",
    "VirtualGrid",
    "asymptotic_klb_thresholds",
    "default_virtual_side",
    "grid_bounds",
    "grid_breakpoints",
    "grid_cov_lower",
    "grid_cov_upper",
    "grid_positions",
    "grid_side",
    "klb_baseline",
    "neighbor_count",
    "neighbor_counts",
]

# squared-distance slack for the closed-ball convention d <= r
_R2_SLACK = EPS_GEO


def grid_side(n: int) -> int:
    """Side length of an ``n``-point square lattice; raises for non-squares."""
    n = int(n)
    s = math.isqrt(n) if n >= 0 else -1
    if n < 1 or s * s != n:
        raise ValueError(f"n must be a positive perfect square, got {n}")
    return s


@dataclass(frozen=True)
class GridSpec:
    n: int
    p: float
    radius: float

    def __post_init__(self):
        grid_side(self.n)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"activation probability must lie in [0, 1], got {self.p}")
        if not self.radius >= 0.0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")

    @property
    def side(self) -> int:
        return grid_side(self.n)


class DeflatedRadiusError(ValueError):
    """The virtual-grid radius ``r - 1/sqrt(2 l)`` is not positive; use a larger ``l``."""


def default_virtual_side(radius: float) -> int:
    """Smallest ``s`` with ``1/(s sqrt 2) <= radius/2``, so the deflated radius is >= r/2."""
    if radius <= 0:
        raise DeflatedRadiusError("radius must be positive to build a virtual grid")
    return max(1, math.ceil(math.sqrt(2.0) / radius - 1e-9))


@dataclass(frozen=True)
class VirtualGrid:
    """Cell-centred ``sqrt(l) x sqrt(l)`` test lattice with the deflated radius."""

    l: int
    deflated_radius: float

    @classmethod
    def for_radius(cls, radius: float, l: Optional[int] = None) -> "VirtualGrid":
        if l is None:
            l = default_virtual_side(radius) ** 2
        grid_side(l)
        rd = radius - 1.0 / math.sqrt(2.0 * l)
        if rd <= 0:
            raise DeflatedRadiusError(
                f"deflated radius {rd:.6g} <= 0 for r={radius}, l={l}; raise l above "
                f"{math.ceil(1.0 / (2.0 * radius * radius))}"
            )
        return cls(l=l, deflated_radius=rd)

    @property
    def points(self) -> np.ndarray:
        return grid_positions(self.l)


def grid_positions(n: int) -> np.ndarray:
    """Cell-centred lattice positions, shape ``(n, 2)``; index ``i * s + j``."""
    s = grid_side(n)
    c = (np.arange(s) + 0.5) / s - 0.5
    xx, yy = np.meshgrid(c, c, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


@numba.njit(cache=True)
def _lattice_counts(s, r, qx, qy):
    out = np.zeros(qx.shape[0], dtype=np.int64)
    if r < 0.0:
        return out
    r2 = r * r + _R2_SLACK
    for q in range(qx.shape[0]):
        x = qx[q]
        y = qy[q]
        i0 = max(int(math.floor((x - r + 0.5) * s - 0.5)) - 1, 0)
        i1 = min(int(math.ceil((x + r + 0.5) * s - 0.5)) + 1, s - 1)
        j0 = max(int(math.floor((y - r + 0.5) * s - 0.5)) - 1, 0)
        j1 = min(int(math.ceil((y + r + 0.5) * s - 0.5)) + 1, s - 1)
        c = 0
        for i in range(i0, i1 + 1):
            dx = (i + 0.5) / s - 0.5 - x
            for j in range(j0, j1 + 1):
                dy = (j + 0.5) / s - 0.5 - y
                if dx * dx + dy * dy <= r2:
                    c += 1
        out[q] = c
    return out


def neighbor_counts(n: int, r: float, qx, qy) -> np.ndarray:
    """Vectorised :func:`neighbor_count` over query coordinates."""
    s = grid_side(n)
    qx = np.ascontiguousarray(qx, dtype=float).ravel()
    qy = np.ascontiguousarray(qy, dtype=float).ravel()
    return _lattice_counts(s, float(r), qx, qy)


def neighbor_count(n: int, r: float, q) -> int:
    """Number of lattice sensors within closed distance ``r`` of ``q``."""
    return int(neighbor_counts(n, r, [q[0]], [q[1]])[0])


def _log_at_least_k(counts, p: float, k: int) -> np.ndarray:
    # log Pr[Binomial(N, p) >= k], computed in the log domain
    counts = np.asarray(counts)
    with np.errstate(divide="ignore"):
        return np.asarray(binom.logsf(k - 1, counts, p), dtype=float)


def _check_k(k: int) -> int:
    k = int(k)
    if k < 1:
        raise ValueError(f"coverage order k must be >= 1, got {k}")
    return k


def grid_cov_lower(spec: GridSpec, k: int = 1, vg: Optional[VirtualGrid] = None) -> float:
    """Product-of-marginals lower bound on the grid k-coverage probability.

    Each virtual point ``u`` contributes ``Pr[Bin(N'(u), p) >= k]`` where
    ``N'(u)`` counts sensors within the deflated radius of ``u``.
    """
    k = _check_k(k)
    if vg is None:
        vg = VirtualGrid.for_radius(spec.radius)
    pts = vg.points
    counts = neighbor_counts(spec.n, vg.deflated_radius, pts[:, 0], pts[:, 1])
    logs = _log_at_least_k(counts, spec.p, k)
    total = float(np.sum(logs))
    return math.exp(total) if total > -math.inf else 0.0


def _upper_exponent(r: float) -> int:
    m = math.floor((1.0 - 2.0 * r) / (2.0 * r) + 1e-12)
    return max(m, 0)


def _corner_count(r: float) -> int:
    """Corners whose closed r-balls are pairwise disjoint (adjacent corners 1 apart, opposite sqrt 2)."""
    if 2.0 * r < 1.0:
        return 4
    if 2.0 * r < math.sqrt(2.0):
        return 2
    return 1


def grid_cov_upper(spec: GridSpec, k: int = 1) -> float:
    """Disjoint-ball upper bound: 4 corners, ``4m`` edge points, ``m^2`` interior.

    ``m = floor((1 - 2r) / (2r))``.  From ``r = 0.5`` on the corner balls
    overlap, so only two opposite corners (one beyond ``sqrt(2)/2``) are used.
    """
    k = _check_k(k)
    r = spec.radius
    if r <= 0.0:
        return 0.0
    m = _upper_exponent(r)
    counts = neighbor_counts(spec.n, r, [0.5, 0.5, 0.0], [0.5, 0.0, 0.0])
    logs = _log_at_least_k(counts, spec.p, k)
    total = 0.0
    for expo, lg in zip((_corner_count(r), 4 * m, m * m), logs):
        if expo:
            total += expo * lg
    return math.exp(total) if total > -math.inf else 0.0


@dataclass(frozen=True)
class BreakpointSet:
    """Sorted realizable pairwise lattice distances ``sqrt(a^2 + b^2) / sqrt(n)``."""

    n: int
    sums: tuple[int, ...]

    @property
    def values(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.sums, dtype=float) / self.n)

    def __len__(self) -> int:
        return len(self.sums)

    def interval_index(self, r: float) -> int:
        """Index ``i`` with ``values[i] <= r < values[i+1]`` (closed-ball rule); -1 below the first."""
        v = self.values
        return int(np.searchsorted(v - 1e-12, r, side="right")) - 1


def grid_breakpoints(n: int) -> BreakpointSet:
    """Distinct lattice distances up to sqrt(2)/2, plus the first one beyond it."""
    s = grid_side(n)
    sums = sorted({a * a + b * b for a in range(s) for b in range(s)} - {0})
    cap = 0.5 * n  # value^2 * n <= (sqrt2/2)^2 * n
    kept = []
    for q in sums:
        kept.append(q)
        if q > cap:
            break
    return BreakpointSet(n=n, sums=tuple(kept))


def asymptotic_klb_thresholds(n: int, p: float, eps: float) -> tuple[float, float]:
    """Large-n k-coverage radius thresholds ``sqrt((1 -/+ eps) log(np) / (pi n p))``."""
    lam = n * p
    if not lam > 1.0:
        raise ValueError(f"n*p must exceed 1 for the asymptotic thresholds, got {lam}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    base = math.log(lam) / (math.pi * lam)
    return math.sqrt((1.0 - eps) * base), math.sqrt((1.0 + eps) * base)


def klb_baseline(r: float, n: int, p: float, eps: float = 0.1) -> Optional[float]:
    """Asymptotic coverage prediction: 1 above the upper threshold, 0 below the lower."""
    lo, hi = asymptotic_klb_thresholds(n, p, eps)
    if r >= hi:
        return 1.0
    if r <= lo:
        return 0.0
    return None


@dataclass(frozen=True)
class BoundReport:
    spec: GridSpec
    k: int
    lower: Optional[float]
    upper: Optional[float]
    baseline: Optional[float] = None
    estimate: Optional[float] = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper + 1e-12:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def grid_bounds(spec: GridSpec, k: int = 1, l: Optional[int] = None, eps: float = 0.1) -> BoundReport:
    """Lower and upper k-coverage bounds for one grid parameter point."""
    prov = {"upper": "grid_disjoint_balls_upper"}
    upper = grid_cov_upper(spec, k)
    corners = _corner_count(spec.radius)
    if corners < 4:
        prov["upper"] += f"(corners={corners})"
    try:
        vg = VirtualGrid.for_radius(spec.radius, l)
        lower = grid_cov_lower(spec, k, vg)
        prov["lower"] = f"grid_virtual_grid_product_lower(l={vg.l})"
    except DeflatedRadiusError:
        lower = None
    baseline = None
    if spec.n * spec.p > 1.0:
        baseline = klb_baseline(spec.radius, spec.n, spec.p, eps)
        prov["baseline"] = f"klb_asymptotic(eps={eps})"
    return BoundReport(spec=spec, k=k, lower=lower, upper=upper, baseline=baseline, provenance=prov)
