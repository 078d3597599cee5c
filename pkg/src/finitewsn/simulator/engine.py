"""Seeded Monte Carlo trials and probability estimates with Wilson intervals.

Trial ``t`` of a run with master seed ``s`` uses the counter stream
``trial_key(s, t)``; node coordinates take counters ``2i, 2i+1``, grid
activations counter ``i``, link coins a derived stream.  Trials run in
fixed blocks of ``BLOCK`` on a thread pool; numba kernels release the GIL.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numba
import numpy as np
from scipy.stats import binomtest

from ..grid_model import GridSpec, grid_positions
from ..random_model import RandSpec
from .coverage import k_cover_kernel
from .graph import geometric_connected, geometric_edges, vertex_connected_kernel
from .rng import as_key, link_key, trial_key, uniform

__all__ = [
    "BLOCK",
    "PROPERTIES",
    "SimResult",
    "WORKERS_ENV",
    "estimate_probability",
    "resolve_workers",
    "sample_grid_activation",
    "sample_uniform_nodes",
    "trial_outcomes",
    "wilson_interval",
]

BLOCK = 10_000
WORKERS_ENV = "FINITEWSN_WORKERS"
PROPERTIES = ("connected", "disconnected", "k-connected", "k-covered")

_GRID, _RANDOM = 0, 1
_CONNECTED, _KCONNECTED, _KCOVERED = 0, 1, 2


# ---------------------------------------------------------------------------
# samplers


@numba.njit(cache=True)
def _activate(key, gx, gy, p, outx, outy):
    c = 0
    for i in range(gx.shape[0]):
        if uniform(key, i) < p:
            outx[c] = gx[i]
            outy[c] = gy[i]
            c += 1
    return c


@numba.njit(cache=True)
def _uniform_nodes(key, n, outx, outy):
    for i in range(n):
        outx[i] = uniform(key, 2 * i) - 0.5
        outy[i] = uniform(key, 2 * i + 1) - 0.5


def sample_grid_activation(spec: GridSpec, seed: int) -> np.ndarray:
    """Active lattice sensors, shape ``(m, 2)``, each kept with probability ``p``."""
    pts = grid_positions(spec.n)
    gx = np.ascontiguousarray(pts[:, 0])
    gy = np.ascontiguousarray(pts[:, 1])
    ox = np.empty(spec.n)
    oy = np.empty(spec.n)
    c = _activate(as_key(seed), gx, gy, float(spec.p), ox, oy)
    return np.column_stack([ox[:c], oy[:c]])


def sample_uniform_nodes(n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. uniform points on the unit square, shape ``(n, 2)``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    ox = np.empty(n)
    oy = np.empty(n)
    _uniform_nodes(as_key(seed), n, ox, oy)
    return np.column_stack([ox, oy])


# ---------------------------------------------------------------------------
# trial kernel


@numba.njit(cache=True, nogil=True)
def _run_block(scenario, prop, master, t0, count, n, gx, gy, r, p, k, out):
    xs = np.empty(n)
    ys = np.empty(n)
    for t in range(count):
        key = trial_key(master, t0 + t)
        if scenario == _GRID:
            m = _activate(key, gx, gy, p, xs, ys)
            link_p = 1.0
        else:
            _uniform_nodes(key, n, xs, ys)
            m = n
            link_p = p
        # contiguous copies: slices would compile to slower strided kernels
        px = xs[:m].copy()
        py = ys[:m].copy()
        if prop == _KCOVERED:
            ok, _, _ = k_cover_kernel(px, py, r, k)
        elif prop == _CONNECTED:
            ok = geometric_connected(px, py, r, link_p, link_key(key))
        elif k >= m:
            # no graph on m nodes is m-connected
            ok = False
        elif k == 1:
            ok = geometric_connected(px, py, r, link_p, link_key(key))
        else:
            ei, ej = geometric_edges(px, py, r, link_p, link_key(key))
            ok = vertex_connected_kernel(m, ei, ej, k)
        out[t] = 1 if ok else 0


def _decode(scenario, prop):
    if isinstance(scenario, GridSpec):
        kind, n, r, p = _GRID, scenario.n, scenario.radius, scenario.p
        pts = grid_positions(n)
        gx, gy = np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1])
    elif isinstance(scenario, RandSpec):
        kind, n, r, p = _RANDOM, scenario.n, scenario.r, scenario.p
        gx = gy = np.empty(0)
    else:
        raise TypeError("scenario must be a GridSpec or a RandSpec")
    codes = {"connected": _CONNECTED, "disconnected": _CONNECTED,
             "k-connected": _KCONNECTED, "k-covered": _KCOVERED}
    if prop not in codes:
        raise ValueError(f"unknown property {prop!r}; expected one of {', '.join(PROPERTIES)}")
    if prop == "k-covered" and not r > 0:
        raise ValueError("coverage needs a positive radius")
    return kind, codes[prop], n, gx, gy, float(r), float(p)


def trial_outcomes(scenario, prop: str, t0: int, count: int, master_seed: int, k: int = 1) -> np.ndarray:
    """Per-trial outcomes (1 = property holds) for trials ``t0 .. t0+count-1``.

    For ``"disconnected"`` the outcome is 1 when the graph is *not* connected.
    """
    kind, code, n, gx, gy, r, p = _decode(scenario, prop)
    out = np.empty(count, dtype=np.uint8)
    _run_block(kind, code, as_key(master_seed), np.int64(t0), count, n, gx, gy, r, p, int(k), out)
    if prop == "disconnected":
        out = 1 - out
    return out


# ---------------------------------------------------------------------------
# estimates


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class SimResult:
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    label: str

    def __post_init__(self):
        if not 0.0 <= self.ci_low <= self.estimate <= self.ci_high <= 1.0:
            raise ValueError("interval must satisfy 0 <= low <= estimate <= high <= 1")

    @classmethod
    def from_counts(cls, successes: int, trials: int, seed: int, label: str) -> "SimResult":
        lo, hi = wilson_interval(successes, trials)
        est = successes / trials
        # guard against last-ulp disagreement between the closed-form bounds and the ratio
        return cls(trials, successes, est, min(lo, est), max(hi, est), seed, label)

    def interval(self, level: float) -> tuple[float, float]:
        """Wilson interval at another confidence level."""
        return wilson_interval(self.successes, self.trials, level)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit value, else ``$FINITEWSN_WORKERS``, 0 meaning all CPUs."""
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _label(scenario, prop, k):
    if isinstance(scenario, GridSpec):
        head = f"grid(n={scenario.n},p={scenario.p:g},r={scenario.radius:.12g})"
    else:
        head = f"random(n={scenario.n},p={scenario.p:g},r={scenario.r:.12g})"
    return f"{head}:{prop}" + (f"(k={k})" if prop.startswith("k-") else "")


def _load_checkpoint(path: Path, ident: dict) -> dict[int, int]:
    if not path.exists():
        return {}
    data = json.loads(path.read_text())
    if data.get("run") != ident:
        raise ValueError(f"checkpoint {path} belongs to a different run")
    return {int(b): int(c) for b, c in data["blocks"].items()}


def _save_checkpoint(path: Path, ident: dict, done: dict[int, int]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({"run": ident, "blocks": {str(b): done[b] for b in sorted(done)}}))
    os.replace(tmp, path)


def estimate_probability(
    scenario: Union[GridSpec, RandSpec],
    prop: str,
    trials: int,
    master_seed: int = 0,
    k: int = 1,
    workers: Optional[int] = None,
    checkpoint: Optional[Union[str, Path]] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SimResult:
    """Frequency of ``prop`` over ``trials`` seeded trials, with a Wilson 95% interval.

    ``checkpoint`` names a JSON file holding per-block success counts; an
    interrupted run resumes from it and ends with the same counts.  The
    result depends only on the arguments, never on ``workers``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    kind, code, n, gx, gy, r, p = _decode(scenario, prop)
    master = as_key(master_seed)
    blocks = [(b, b * BLOCK, min(BLOCK, trials - b * BLOCK)) for b in range(-(-trials // BLOCK))]

    ident = {"label": _label(scenario, prop, k), "trials": trials, "seed": int(master_seed)}
    ck = Path(checkpoint) if checkpoint else None
    done = _load_checkpoint(ck, ident) if ck else {}

    def run(block):
        b, t0, cnt = block
        out = np.empty(cnt, dtype=np.uint8)
        _run_block(kind, code, master, np.int64(t0), cnt, n, gx, gy, r, p, k, out)
        return b, int(out.sum())

    todo = [blk for blk in blocks if blk[0] not in done]
    nw = min(resolve_workers(workers), max(1, len(todo)))
    finished = len(blocks) - len(todo)
    with ThreadPoolExecutor(max_workers=nw) as pool:
        for b, s in pool.map(run, todo):
            done[b] = s
            finished += 1
            if ck:
                _save_checkpoint(ck, ident, done)
            if progress:
                progress(finished, len(blocks))
    holds = sum(done[b] for b, _, _ in blocks)
    successes = trials - holds if prop == "disconnected" else holds
    return SimResult.from_counts(successes, trials, int(master_seed), ident["label"])
