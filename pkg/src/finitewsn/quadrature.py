"""Integration over the unit square.

Two-dimensional integrals use adaptive cubature (nested Gauss-Kronrod tensor
rule per cell, worst cell refined first), delegated to
:func:`scipy.integrate.cubature`.  Four-dimensional pair integrals are
estimated by seeded Monte Carlo, because the lens-clipping kink surface
defeats the error model of smooth cubature rules.

Integrands take coordinate arrays ``f(x, y) -> values`` (pair integrands
``g(x1, y1, x2, y2)``) and must be pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cubature

__all__ = [
    "DEFAULT_BUDGET",
    "QuadResult",
    "SymmetryError",
    "integrate_octant_symmetric",
    "integrate_unit_square",
    "mc_near_pair_integral",
    "mc_pair_integral",
]

DEFAULT_BUDGET = 10_000_000
# tensor-product GK21 rule in 2-D
_POINTS_PER_CELL = 21 * 21
_MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


class SymmetryError(ValueError):
    """Integrand declared square-symmetric fails a mirrored spot check."""


class _Counted:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, pts):
        self.calls += len(pts)
        out = np.asarray(self.f(pts[:, 0], pts[:, 1]), dtype=float)
        return np.broadcast_to(out, (len(pts),))


def _cubature_piece(f, a, b, tol, budget):
    counted = _Counted(f)
    res = cubature(
        counted,
        a,
        b,
        rule="gk21",
        atol=tol,
        rtol=0.0,
        max_subdivisions=max(1, budget // _POINTS_PER_CELL),
    )
    err = float(res.error)
    return float(res.estimate), err, counted.calls, res.status == "converged" and err <= tol


def _combine(pieces, tol) -> QuadResult:
    # fixed summation order: pieces are produced in deterministic cell order
    value = math.fsum(p[0] for p in pieces)
    err = math.fsum(p[1] for p in pieces)
    evals = sum(p[2] for p in pieces)
    converged = all(p[3] for p in pieces) and err <= tol * (1 + 1e-12)
    return QuadResult(value=value, error_estimate=err, evaluations=evals, converged=converged)


def _cuts(breaks, lo, hi):
    inner = sorted({float(c) for c in (breaks or ()) if lo + 1e-9 < c < hi - 1e-9})
    return [lo, *inner, hi]


def integrate_unit_square(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float = 1e-6,
    budget: int = DEFAULT_BUDGET,
    breaks=None,
) -> QuadResult:
    """Integrate ``f`` over the unit square to absolute tolerance ``tol``.

    ``breaks`` are coordinates where ``f`` is known to lose smoothness; the
    square is pre-split along them (on both axes) so that no cell straddles
    a kink, and ``tol`` is shared among the cells in proportion to area.

    A non-converged result (evaluation budget exhausted) is returned with
    its best estimate and ``converged=False``; the caller decides whether
    that is fatal.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    cuts = _cuts(breaks, -0.5, 0.5)
    pieces = []
    for i in range(len(cuts) - 1):
        for j in range(len(cuts) - 1):
            a = [cuts[i], cuts[j]]
            b = [cuts[i + 1], cuts[j + 1]]
            area = (b[0] - a[0]) * (b[1] - a[1])
            pieces.append(_cubature_piece(f, a, b, tol * area, budget))
    return _combine(pieces, tol)


_DIHEDRAL = (
    (1, 1, False),
    (-1, 1, False),
    (1, -1, False),
    (-1, -1, False),
    (1, 1, True),
    (-1, 1, True),
    (1, -1, True),
    (-1, -1, True),
)


def _check_symmetry(f, probes: int = 16, atol: float = 1e-10) -> None:
    rng = np.random.default_rng(20240601)
    x = rng.uniform(-0.5, 0.5, probes)
    y = rng.uniform(-0.5, 0.5, probes)
    images = []
    for sx, sy, swap in _DIHEDRAL:
        u, v = (sy * y, sx * x) if swap else (sx * x, sy * y)
        images.append(np.asarray(f(u, v), dtype=float) * np.ones(probes))
    ref = images[0]
    scale = np.maximum(1.0, np.abs(ref))
    for img in images[1:]:
        if np.any(np.abs(img - ref) > atol * scale):
            raise SymmetryError("integrand is not invariant under the symmetries of the square")


def integrate_octant_symmetric(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float = 1e-6,
    budget: int = DEFAULT_BUDGET,
    breaks=None,
) -> QuadResult:
    """Integrate a square-symmetric ``f`` over one octant and multiply by 8.

    The octant ``0 <= y <= x <= 0.5`` is cut along ``x = c`` and ``y = c`` for
    each ``c`` in ``breaks`` (absolute values are used).  Off-diagonal cells
    are rectangles; diagonal cells are triangles mapped onto rectangles by
    ``y = lo + (x - lo) * t`` with Jacobian ``x - lo``.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _check_symmetry(f)
    cuts = _cuts([abs(c) for c in (breaks or ())], 0.0, 0.5)
    pieces = []
    for i in range(len(cuts) - 1):
        xlo, xhi = cuts[i], cuts[i + 1]
        for j in range(i):
            ylo, yhi = cuts[j], cuts[j + 1]
            area = (xhi - xlo) * (yhi - ylo)
            pieces.append(_cubature_piece(f, [xlo, ylo], [xhi, yhi], tol * area, budget))

        def tri(x, t, lo=xlo):
            return np.asarray(f(x, lo + (x - lo) * t), dtype=float) * (x - lo)

        area = 0.5 * (xhi - xlo) ** 2
        pieces.append(_cubature_piece(tri, [xlo, 0.0], [xhi, 1.0], tol * area, budget))
    res = _combine(pieces, tol / 8.0)
    return QuadResult(
        value=8.0 * res.value,
        error_estimate=8.0 * res.error_estimate,
        evaluations=res.evaluations,
        converged=res.converged,
    )


# ---------------------------------------------------------------------------
# Monte Carlo pair integrals


def _chunk_sizes(samples: int):
    full, rest = divmod(samples, _MC_CHUNK)
    return [_MC_CHUNK] * full + ([rest] if rest else [])


def _mc(draw, g, samples, seed, scale=1.0) -> QuadResult:
    if samples <= 0:
        raise ValueError("samples must be positive")
    sizes = _chunk_sizes(samples)
    # one child stream per fixed-size chunk: results do not depend on how
    # chunks are scheduled
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    total = 0.0
    total_sq = 0.0
    for size, ss in zip(sizes, streams):
        rng = np.random.default_rng(ss)
        vals = scale * np.asarray(draw(rng, size, g), dtype=float)
        vals = np.broadcast_to(vals, (size,))
        total += float(vals.sum())
        total_sq += float(np.dot(vals, vals))
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    stderr = math.sqrt(var / samples) if samples > 1 else 0.0
    if stderr < 1e-15 * max(1.0, abs(mean)):
        stderr = 0.0
    return QuadResult(value=mean, error_estimate=stderr, evaluations=samples, converged=True)


def _uniform_pairs(rng, size, g):
    p = rng.uniform(-0.5, 0.5, (4, size))
    return g(p[0], p[1], p[2], p[3])


def mc_pair_integral(
    g: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    samples: int = 1_000_000,
    seed: int = 0,
) -> QuadResult:
    """Mean of ``g(X, Y)`` over i.i.d. uniform pairs in the square.

    ``error_estimate`` is the sample standard error.  Deterministic per seed.
    """
    return _mc(_uniform_pairs, g, samples, seed)


def mc_near_pair_integral(
    g: Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    radius: float,
    samples: int = 1_000_000,
    seed: int = 0,
) -> QuadResult:
    """Estimate ``integral over {d(X, Y) <= radius} of g(X, Y) dX dY``.

    ``X`` is uniform on the square and ``Y`` uniform on the disk of the given
    radius around ``X``; draws with ``Y`` outside the square contribute 0.
    Much lower variance than :func:`mc_pair_integral` times an indicator
    when the radius is small.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0:
        return QuadResult(0.0, 0.0, 0, True)

    def draw(rng, size, g):
        u = rng.random((4, size))
        x1 = u[0] - 0.5
        y1 = u[1] - 0.5
        rho = radius * np.sqrt(u[2])
        th = 2.0 * math.pi * u[3]
        x2 = x1 + rho * np.cos(th)
        y2 = y1 + rho * np.sin(th)
        inside = (np.abs(x2) <= 0.5) & (np.abs(y2) <= 0.5)
        out = np.zeros(size)
        if inside.any():
            out[inside] = g(x1[inside], y1[inside], x2[inside], y2[inside])
        return out

    return _mc(draw, g, samples, seed, scale=math.pi * radius * radius)
