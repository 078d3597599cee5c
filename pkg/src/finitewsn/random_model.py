"""Uniform random deployments ``g(n, r, p)`` on the unit square.

Coverage bounds, the isolated-node disconnectivity estimate and its
inclusion-exclusion lower bound, the isolated-pair term, the k-connectivity
estimate and the asymptotic (large-n) baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numba
import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .geometry import lens_scalar, nu_scalar, clipped_disk_areas
from .grid_model import VirtualGrid, _corner_count, _upper_exponent
from .quadrature import (
    QuadResult,
    integrate_octant_symmetric,
    mc_near_pair_integral,
    mc_pair_integral,
)

__all__ = [
    "DiscBoundReport",
    "MCValue",
    "QuadratureError",
    "RandSpec",
    "asymptotic_disc",
    "disc_bounds",
    "disc_estimate",
    "disc_lower_bound",
    "isolated_pair_term",
    "kdisc_estimate",
    "pair_isolation_base",
    "rand_cov_lower",
    "rand_cov_upper",
]

DEFAULT_TOL = 1e-6
DEFAULT_PAIR_SAMPLES = 1_000_000


@dataclass(frozen=True)
class RandSpec:
    n: int
    r: float
    p: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.r >= 0:
            raise ValueError(f"radius must be >= 0, got {self.r}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"link probability must lie in (0, 1], got {self.p}")


class QuadratureError(RuntimeError):
    def __init__(self, message: str, result: QuadResult):
        super().__init__(f"{message} (achieved error estimate {result.error_estimate:.3g})")
        self.result = result


class MCValue(NamedTuple):
    value: float
    stderr: float


def _nu_breaks(r: float) -> list[float]:
    # lines where a disk of radius r centred at (x, .) starts touching an edge
    out = []
    for c in (0.5 - r, r - 0.5):
        if 0.0 < c < 0.5:
            out.append(c)
    return out


# ---------------------------------------------------------------------------
# coverage


def rand_cov_lower(n: int, r: float, vg: Optional[VirtualGrid] = None) -> float:
    """Union-bound coverage lower bound over a virtual grid, clamped at 0."""
    if vg is None:
        vg = VirtualGrid.for_radius(r)
    pts = vg.points
    nu = clipped_disk_areas(pts[:, 0], pts[:, 1], vg.deflated_radius)
    miss = np.exp(n * np.log1p(-np.minimum(nu, 1.0))) if n else np.ones_like(nu)
    return max(0.0, 1.0 - math.fsum(miss))


def rand_cov_upper(n: int, r: float) -> float:
    """Coverage upper bound from corner, ``4m`` edge and ``m^2`` interior test points.

    The test points have disjoint r-balls; past ``r = 0.5`` only two
    opposite corners (one beyond ``sqrt(2)/2``) qualify.
    """
    if r <= 0.0 or n <= 0:
        return 0.0
    m = _upper_exponent(r)
    areas = (min(nu_scalar(0.5, 0.5, r), 1.0), 0.5 * math.pi * r * r, math.pi * r * r)
    total = 0.0
    for area, expo in zip(areas, (_corner_count(r), 4 * m, m * m)):
        if not expo:
            continue
        miss = max(0.0, 1.0 - area) ** n
        hit = 1.0 - miss
        if hit <= 0.0:
            return 0.0
        total += expo * math.log(hit)
    return math.exp(total)


# ---------------------------------------------------------------------------
# connectivity


def _isolation_integrand(n: int, r: float, p: float):
    def f(x, y):
        nu = clipped_disk_areas(x, y, r)
        return np.power(np.maximum(1.0 - p * nu, 0.0), n - 1)

    return f


def _integrate(f, r, tol, what):
    res = integrate_octant_symmetric(f, tol, breaks=_nu_breaks(r))
    if not res.converged:
        raise QuadratureError(f"{what}: quadrature did not converge", res)
    return res


def disc_estimate(n: int, r: float, p: float = 1.0, tol: float = DEFAULT_TOL) -> float:
    """Expected number of isolated nodes, ``n * int (1 - p nu(B(X, r)))^(n-1) dX``.

    This is the disconnectivity estimate for the regime where it is small.
    ``tol`` bounds the absolute error of the returned value.  The value is
    not capped: at ``r = 0`` it equals ``n``.
    """
    RandSpec(n, r, p)
    if n < 2:
        raise ValueError("disconnectivity needs n >= 2")
    res = _integrate(_isolation_integrand(n, r, p), r, tol / n, "isolated-node integral")
    return n * res.value


@numba.njit(cache=True)
def _pair_base_scalar(x1, y1, x2, y2, r, p):
    # Pr[a third uniform node links to neither endpoint]
    v = 1.0 - p * nu_scalar(x1, y1, r) - p * nu_scalar(x2, y2, r)
    if (x1 - x2) ** 2 + (y1 - y2) ** 2 < 4.0 * r * r:
        v += p * p * lens_scalar(x1, y1, x2, y2, r)
    return max(v, 0.0)


@numba.vectorize(
    ["float64(float64, float64, float64, float64, float64, float64)"], cache=True
)
def pair_isolation_base(x1, y1, x2, y2, r, p):
    """``1 - p nu(B_X) - p nu(B_Y) + p^2 nu(B_X & B_Y)`` (lens area exact)."""
    return _pair_base_scalar(x1, y1, x2, y2, r, p)


def _pair_integrand(n, r, p):
    def g(x1, y1, x2, y2):
        return np.power(pair_isolation_base(x1, y1, x2, y2, r, p), n - 2)

    return g


def disc_lower_bound(
    n: int,
    r: float,
    p: float = 1.0,
    pair_samples: int = DEFAULT_PAIR_SAMPLES,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> MCValue:
    """Second-order inclusion-exclusion lower bound on disconnectivity.

    ``a1 - C(n, 2) * J`` with ``J`` the pair-isolation integral over the
    whole square estimated from ``pair_samples`` uniform pairs.  Clamped at
    0; ``stderr`` is the Monte Carlo standard error of the subtracted term.
    """
    a1 = disc_estimate(n, r, p, tol)
    j = mc_pair_integral(_pair_integrand(n, r, p), pair_samples, seed)
    c2 = n * (n - 1) / 2.0
    return MCValue(max(0.0, a1 - c2 * j.value), c2 * j.error_estimate)


def isolated_pair_term(
    n: int,
    r: float,
    p: float = 1.0,
    pair_samples: int = DEFAULT_PAIR_SAMPLES,
    seed: int = 0,
) -> MCValue:
    """Expected number of two-node components, ``C(n,2) Pr{v1, v2 form a component}``.

    The pair must be within range and linked (probability ``p``) while the
    other ``n - 2`` nodes link to neither endpoint.
    """
    RandSpec(n, r, p)
    if n < 4:
        raise ValueError("the isolated-pair term needs n >= 4")
    if r == 0.0:
        return MCValue(0.0, 0.0)
    c2 = n * (n - 1) / 2.0
    res = mc_near_pair_integral(_pair_integrand(n, r, p), r, pair_samples, seed)
    return MCValue(c2 * p * res.value, c2 * p * res.error_estimate)


def kdisc_estimate(n: int, r: float, k: int, tol: float = DEFAULT_TOL) -> float:
    """Estimate of Pr[g(n, r) is not k-connected] from nodes of degree < k.

    ``sum_{j<k} n C(n, j) int nu^j (1 - nu)^(n-j-1) dX``, evaluated per
    point in the log domain.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    RandSpec(n, r, 1.0)
    js = np.arange(k, dtype=float)
    log_coef = math.log(n) + gammaln(n + 1.0) - gammaln(js + 1.0) - gammaln(n - js + 1.0)

    def f(x, y):
        nu = np.minimum(clipped_disk_areas(x, y, r), 1.0)[..., None]
        terms = log_coef + xlogy(js, nu) + xlog1py(n - js - 1.0, -nu)
        return np.exp(terms).sum(axis=-1)

    res = _integrate(f, r, tol, "degree-deficit integral")
    return res.value


def asymptotic_disc(n: int, r: float) -> float:
    """Large-n disconnectivity ``1 - exp(-n exp(-n pi r^2))``, tiny values preserved."""
    if n < 1 or r < 0:
        raise ValueError("need n >= 1 and r >= 0")
    lam = math.exp(math.log(n) - n * math.pi * r * r)
    return -math.expm1(-lam)


@dataclass(frozen=True)
class DiscBoundReport:
    spec: RandSpec
    lower: float
    upper_truncated: float
    estimate: float
    a1: float
    a2: float
    a1_error: float
    a2_stderr: float
    lower_stderr: float
    baseline: float
    raw: dict
    truncated: bool = True

    def __post_init__(self):
        if self.a2 < 0:
            raise ValueError("a2 must be nonnegative")


def _clamp(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def disc_bounds(
    spec: RandSpec,
    pair_samples: int = DEFAULT_PAIR_SAMPLES,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> DiscBoundReport:
    """All disconnectivity numbers for one parameter point.

    The upper bound keeps only the isolated-node and isolated-pair terms
    (``truncated=True``): components of three or more nodes are omitted.
    """
    n, r, p = spec.n, spec.r, spec.p
    a1 = disc_estimate(n, r, p, tol)
    lower = disc_lower_bound(n, r, p, pair_samples, seed, tol)
    a2 = isolated_pair_term(n, r, p, pair_samples, seed + 1) if n >= 4 else MCValue(0.0, 0.0)
    raw = {"a1": a1, "a2": a2.value, "lower": lower.value, "upper": a1 + a2.value}
    return DiscBoundReport(
        spec=spec,
        lower=_clamp(lower.value),
        upper_truncated=_clamp(a1 + a2.value),
        estimate=_clamp(a1),
        a1=a1,
        a2=a2.value,
        a1_error=tol,
        a2_stderr=a2.stderr,
        lower_stderr=lower.stderr,
        baseline=asymptotic_disc(n, r),
        raw=raw,
    )
