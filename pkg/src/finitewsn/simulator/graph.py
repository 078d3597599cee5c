"""Geometric graphs with link failures and exact connectivity tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from ..geometry import EPS_GEO
from .rng import as_key, link_key, uniform

__all__ = [
    "Graph",
    "build_geometric_graph",
    "is_connected",
    "local_vertex_connectivity",
    "vertex_connectivity_at_least",
]

log = logging.getLogger(__name__)

_MAX_CELLS = 128


@dataclass(frozen=True)
class Graph:
    """Node positions ``(n, 2)`` and undirected edges ``(m, 2)`` with ``u < v``."""

    positions: np.ndarray
    edges: np.ndarray

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[int(u)].add(int(v))
            adj[int(v)].add(int(u))
        return adj


# ---------------------------------------------------------------------------
# spatial index


@numba.njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True)
def cell_index(xs, ys, cell):
    """Bucket points of the unit square into ``m x m`` cells of side >= ``cell``.

    Returns ``(m, start, order)``: points of cell ``c`` are
    ``order[start[c]:start[c + 1]]``.
    """
    n = xs.shape[0]
    if cell > 0.0:
        m = max(1, min(int(1.0 / cell), _MAX_CELLS))
    else:
        m = _MAX_CELLS
    cid = np.empty(n, dtype=np.int64)
    start = np.zeros(m * m + 1, dtype=np.int64)
    for i in range(n):
        cx = min(max(int((xs[i] + 0.5) * m), 0), m - 1)
        cy = min(max(int((ys[i] + 0.5) * m), 0), m - 1)
        cid[i] = cx * m + cy
        start[cid[i] + 1] += 1
    for c in range(m * m):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    order = np.empty(n, dtype=np.int64)
    for i in range(n):
        order[fill[cid[i]]] = i
        fill[cid[i]] += 1
    return m, start, order


@numba.njit(cache=True)
def _strips(xs, r):
    # counting sort into vertical strips of width >= r: partners of a point
    # lie in its own strip or the next one, i.e. in one contiguous range
    n = xs.shape[0]
    m = max(1, min(int(1.0 / r), _MAX_CELLS)) if r > 0.0 else _MAX_CELLS
    sid = np.empty(n, dtype=np.int64)
    start = np.zeros(m + 2, dtype=np.int64)
    for i in range(n):
        sid[i] = min(max(int((xs[i] + 0.5) * m), 0), m - 1)
        start[sid[i] + 1] += 1
    for c in range(m):
        start[c + 1] += start[c]
    start[m + 1] = start[m]
    fill = start[:m].copy()
    order = np.empty(n, dtype=np.int64)
    for i in range(n):
        order[fill[sid[i]]] = i
        fill[sid[i]] += 1
    return m, start, order, sid


@numba.njit(cache=True)
def geometric_edges(xs, ys, r, p, lkey):
    """Edges ``{i, j}``, ``i < j``, with ``d <= r`` whose link coin ``u(lkey, i*n+j) < p`` succeeds.

    Candidate pairs come from a strip index of width >= ``r``; the inner
    loop is branch-free (always store, advance on success).
    """
    n = xs.shape[0]
    if n < 2 or r < 0.0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    r2 = r * r + EPS_GEO
    coins = p < 1.0
    m, start, order, sid = _strips(xs, r)
    sx = np.empty(n)
    sy = np.empty(n)
    for a in range(n):
        sx[a] = xs[order[a]]
        sy[a] = ys[order[a]]
    total = 0
    for c in range(m):
        k = start[c + 1] - start[c]
        total += k * (k - 1) // 2 + k * (start[c + 2] - start[c + 1])
    ei = np.empty(total, dtype=np.int64)
    ej = np.empty(total, dtype=np.int64)
    cnt = 0
    for c in range(m):
        stop = start[c + 2]
        for a in range(start[c], start[c + 1]):
            ax = sx[a]
            ay = sy[a]
            oa = order[a]
            for b in range(a + 1, stop):
                dx = ax - sx[b]
                dy = ay - sy[b]
                ob = order[b]
                lo = min(oa, ob)
                hi = max(oa, ob)
                ei[cnt] = lo
                ej[cnt] = hi
                cnt += dx * dx + dy * dy <= r2
    if coins:
        # link coins only for pairs in range, compacted in place
        kept = 0
        for e in range(cnt):
            lo = ei[e]
            hi = ej[e]
            ei[kept] = lo
            ej[kept] = hi
            kept += uniform(lkey, lo * n + hi) < p
        cnt = kept
    return ei[:cnt], ej[:cnt]


@numba.njit(cache=True)
def connected_kernel(n, ei, ej):
    if n <= 1:
        return True
    parent = np.arange(n)
    comps = n
    for e in range(ei.shape[0]):
        a = _find(parent, ei[e])
        b = _find(parent, ej[e])
        if a != b:
            parent[a] = b
            comps -= 1
            if comps == 1:
                return True
    return comps == 1


@numba.njit(cache=True)
def geometric_connected(xs, ys, r, p, lkey):
    """Connectivity of the geometric graph on the given points."""
    ei, ej = geometric_edges(xs, ys, r, p, lkey)
    return connected_kernel(xs.shape[0], ei, ej)


@numba.njit(cache=True)
def csr(n, ei, ej):
    deg = np.zeros(n + 1, dtype=np.int64)
    for e in range(ei.shape[0]):
        deg[ei[e] + 1] += 1
        deg[ej[e] + 1] += 1
    for i in range(n):
        deg[i + 1] += deg[i]
    fill = deg[:-1].copy()
    nbr = np.empty(deg[n], dtype=np.int64)
    for e in range(ei.shape[0]):
        u = ei[e]
        v = ej[e]
        nbr[fill[u]] = v
        fill[u] += 1
        nbr[fill[v]] = u
        fill[v] += 1
    return deg, nbr


# ---------------------------------------------------------------------------
# connectivity kernels


@numba.njit(cache=True)
def biconnected_kernel(n, indptr, nbr):
    """2-vertex-connectivity: connected, ``n >= 3`` and no articulation point."""
    if n < 3:
        return False
    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    it = indptr[:-1].copy()
    stack = np.empty(n, dtype=np.int64)
    disc[0] = 0
    clock = 1
    sp = 0
    stack[0] = 0
    root_children = 0
    while sp >= 0:
        u = stack[sp]
        if it[u] < indptr[u + 1]:
            v = nbr[it[u]]
            it[u] += 1
            if disc[v] < 0:
                parent[v] = u
                disc[v] = clock
                low[v] = clock
                clock += 1
                sp += 1
                stack[sp] = v
                if u == 0:
                    root_children += 1
            elif v != parent[u] and disc[v] < low[u]:
                low[u] = disc[v]
        else:
            sp -= 1
            if sp >= 0:
                w = stack[sp]
                if low[u] < low[w]:
                    low[w] = low[u]
                if w != 0 and low[u] >= disc[w]:
                    return False
    return clock == n and root_children <= 1


@numba.njit(cache=True)
def _split_network(n, indptr, nbr):
    # vertex u -> in-node 2u, out-node 2u+1 joined by a unit arc; every
    # undirected edge {u, w} becomes out(u)->in(w) and out(w)->in(u)
    narcs = 2 * (n + nbr.shape[0])
    tail = np.empty(narcs, dtype=np.int64)
    head = np.empty(narcs, dtype=np.int64)
    a = 0
    for u in range(n):
        tail[a] = 2 * u
        head[a] = 2 * u + 1
        tail[a + 1] = 2 * u + 1
        head[a + 1] = 2 * u
        a += 2
        for idx in range(indptr[u], indptr[u + 1]):
            w = nbr[idx]
            tail[a] = 2 * u + 1
            head[a] = 2 * w
            tail[a + 1] = 2 * w
            head[a + 1] = 2 * u + 1
            a += 2
    # arc pairs (2q, 2q+1) are mutual reverses; cap 1 forward, 0 backward
    nn = 2 * n
    astart = np.zeros(nn + 1, dtype=np.int64)
    for e in range(narcs):
        astart[tail[e] + 1] += 1
    for x in range(nn):
        astart[x + 1] += astart[x]
    fill = astart[:-1].copy()
    pos = np.empty(narcs, dtype=np.int64)
    for e in range(narcs):
        pos[e] = fill[tail[e]]
        fill[tail[e]] += 1
    ato = np.empty(narcs, dtype=np.int64)
    arev = np.empty(narcs, dtype=np.int64)
    cap0 = np.empty(narcs, dtype=np.int64)
    for e in range(narcs):
        ato[pos[e]] = head[e]
        arev[pos[e]] = pos[e ^ 1]
        cap0[pos[e]] = 1 if e % 2 == 0 else 0
    return astart, ato, arev, cap0


@numba.njit(cache=True)
def _max_flow(s, t, limit, astart, ato, arev, cap0, cap, prev, seen, queue, stamp):
    # unit-capacity augmenting paths from out(s) to in(t), stopping at ``limit``
    cap[:] = cap0
    src = 2 * s + 1
    sink = 2 * t
    flow = 0
    while flow < limit:
        stamp += 1
        seen[src] = stamp
        qh = 0
        qt = 1
        queue[0] = src
        found = False
        while qh < qt and not found:
            x = queue[qh]
            qh += 1
            for a in range(astart[x], astart[x + 1]):
                if cap[a] > 0:
                    y = ato[a]
                    if seen[y] != stamp:
                        seen[y] = stamp
                        prev[y] = a
                        if y == sink:
                            found = True
                            break
                        queue[qt] = y
                        qt += 1
        if not found:
            break
        y = sink
        while y != src:
            a = prev[y]
            cap[a] -= 1
            cap[arev[a]] += 1
            y = ato[arev[a]]
        flow += 1
    return flow, stamp


@numba.njit(cache=True)
def local_connectivity_kernel(n, indptr, nbr, s, t, limit):
    astart, ato, arev, cap0 = _split_network(n, indptr, nbr)
    nn = 2 * n
    cap = np.empty_like(cap0)
    flow, _ = _max_flow(
        s, t, limit, astart, ato, arev, cap0, cap,
        np.empty(nn, np.int64), np.zeros(nn, np.int64), np.empty(nn, np.int64), 0,
    )
    return flow


@numba.njit(cache=True)
def k_connected_kernel(n, indptr, nbr, k):
    """Exact test of k-vertex-connectivity by capped max-flow.

    With ``v`` of minimum degree, the graph is k-connected iff every
    non-neighbour ``w`` of ``v`` has ``kappa(v, w) >= k`` and every
    non-adjacent pair of neighbours of ``v`` has ``kappa >= k``.
    """
    if k <= 0:
        return True
    if n <= k:
        return False
    v = 0
    for u in range(n):
        d = indptr[u + 1] - indptr[u]
        if d < k:
            return False
        if d < indptr[v + 1] - indptr[v]:
            v = u
    adj = np.zeros((n, n), dtype=np.bool_)
    for u in range(n):
        for idx in range(indptr[u], indptr[u + 1]):
            adj[u, nbr[idx]] = True
    astart, ato, arev, cap0 = _split_network(n, indptr, nbr)
    nn = 2 * n
    cap = np.empty_like(cap0)
    prev = np.empty(nn, np.int64)
    seen = np.zeros(nn, np.int64)
    queue = np.empty(nn, np.int64)
    stamp = 0
    for w in range(n):
        if w == v or adj[v, w]:
            continue
        f, stamp = _max_flow(v, w, k, astart, ato, arev, cap0, cap, prev, seen, queue, stamp)
        if f < k:
            return False
    for ia in range(indptr[v], indptr[v + 1]):
        x = nbr[ia]
        for ib in range(ia + 1, indptr[v + 1]):
            y = nbr[ib]
            if adj[x, y]:
                continue
            f, stamp = _max_flow(x, y, k, astart, ato, arev, cap0, cap, prev, seen, queue, stamp)
            if f < k:
                return False
    return True


@numba.njit(cache=True)
def vertex_connected_kernel(n, ei, ej, k):
    if k <= 1:
        return connected_kernel(n, ei, ej)
    indptr, nbr = csr(n, ei, ej)
    if k == 2:
        return biconnected_kernel(n, indptr, nbr)
    return k_connected_kernel(n, indptr, nbr, k)


# ---------------------------------------------------------------------------
# public API


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return np.empty((0, 2))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    return np.ascontiguousarray(pts)


def build_geometric_graph(points, r: float, p: float = 1.0, seed: int = 0) -> Graph:
    """Link every pair at distance ``<= r``, each independently kept with probability ``p``.

    Link coins come from the counter stream of ``seed``, so the same seed
    gives the same graph and a larger ``r`` only adds edges.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"link probability must lie in (0, 1], got {p}")
    if not r >= 0.0:
        raise ValueError(f"radius must be >= 0, got {r}")
    pts = _as_points(points)
    ei, ej = geometric_edges(pts[:, 0].copy(), pts[:, 1].copy(), float(r), float(p), np.uint64(link_key(as_key(seed))))
    edges = np.column_stack([ei, ej]) if ei.size else np.empty((0, 2), dtype=np.int64)
    return Graph(positions=pts, edges=edges)


def _edge_arrays(g: Graph):
    e = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    return np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1])


def is_connected(g: Graph) -> bool:
    """Union-find connectivity; empty and single-node graphs are connected."""
    ei, ej = _edge_arrays(g)
    return bool(connected_kernel(g.n, ei, ej))


def vertex_connectivity_at_least(g: Graph, k: int) -> bool:
    """True iff ``g`` stays connected after deleting any ``k - 1`` vertices.

    ``k >= n`` returns False: no graph on ``n`` nodes is ``n``-connected.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k >= g.n:
        log.info("k=%d >= n=%d: not k-connected by convention", k, g.n)
        return False
    if k == 1:
        return is_connected(g)
    ei, ej = _edge_arrays(g)
    return bool(vertex_connected_kernel(g.n, ei, ej, k))


def local_vertex_connectivity(g: Graph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of internally vertex-disjoint ``s``-``t`` paths (non-adjacent ``s, t``)."""
    if s == t:
        raise ValueError("endpoints must differ")
    ei, ej = _edge_arrays(g)
    indptr, nbr = csr(g.n, ei, ej)
    if limit is None:
        limit = g.n
    return int(local_connectivity_kernel(g.n, indptr, nbr, int(s), int(t), int(limit)))
