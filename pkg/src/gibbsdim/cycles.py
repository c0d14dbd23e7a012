"""Cycle means and cycle ratios on small dense digraphs.

Graphs arrive as a boolean adjacency matrix plus one or two weight matrices.
All routines assume every vertex has an outgoing edge; the specs feeding them
are strongly connected (mixing), which Karp's formula additionally needs.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError


def karp_max_cycle_mean(adj: np.ndarray, w: np.ndarray):
    """Maximum cycle mean and one attaining cycle (list of vertices)."""
    n = adj.shape[0]
    NEG = -np.inf
    d = np.full((n + 1, n), NEG)
    parent = np.full((n + 1, n), -1, dtype=np.int64)
    d[0, :] = 0.0
    for k in range(1, n + 1):
        for v in range(n):
            best, arg = NEG, -1
            for u in range(n):
                if adj[u, v] and d[k - 1, u] > NEG:
                    cand = d[k - 1, u] + w[u, v]
                    if cand > best:
                        best, arg = cand, u
            d[k, v] = best
            parent[k, v] = arg
    best_mean, best_v = NEG, -1
    for v in range(n):
        if d[n, v] == NEG:
            continue
        worst = np.inf
        for k in range(n):
            if d[k, v] > NEG:
                worst = min(worst, (d[n, v] - d[k, v]) / (n - k))
        if worst > best_mean:
            best_mean, best_v = worst, v
    if best_v < 0:
        raise NumericalError("graph has no cycle reachable by length-n walks")
    # walk parents from (n, best_v); a repeated vertex closes a max-mean cycle
    path = []
    k, v = n, best_v
    while k > 0:
        path.append(v)
        v = int(parent[k, v])
        k -= 1
    path.append(v)
    path.reverse()  # forward edge order
    seen = {}
    cycle = None
    for i, u in enumerate(path):
        if u in seen:
            cycle = path[seen[u]:i]
            break
        seen[u] = i
    if cycle is None:
        cycle = [best_v]
    return float(best_mean), cycle


def find_positive_cycle(adj: np.ndarray, w: np.ndarray, tol: float):
    """A cycle of total weight > tol if one exists, else None (Bellman-Ford)."""
    n = adj.shape[0]
    dist = np.zeros(n)
    parent = np.full(n, -1, dtype=np.int64)
    last = -1
    for _ in range(n):
        last = -1
        for u in range(n):
            for v in range(n):
                if adj[u, v] and dist[u] + w[u, v] > dist[v] + tol:
                    dist[v] = dist[u] + w[u, v]
                    parent[v] = u
                    last = v
        if last < 0:
            return None
    # still improving after n rounds: trace back into the positive cycle
    v = last
    for _ in range(n):
        v = int(parent[v])
    cycle = [v]
    u = int(parent[v])
    while u != v:
        cycle.append(u)
        u = int(parent[u])
    cycle.reverse()
    return cycle


def cycle_sum(w: np.ndarray, cycle) -> float:
    total = 0.0
    for i, u in enumerate(cycle):
        total += w[u, cycle[(i + 1) % len(cycle)]]
    return float(total)


def max_cycle_ratio(adj: np.ndarray, num: np.ndarray, den: np.ndarray,
                    tol: float = 1e-13, max_rounds: int = 10_000):
    """max over directed cycles of sum(num)/sum(den); den must be positive on edges.

    Parametric search: at ratio r, some cycle beats r iff the weights
    num - r*den admit a positive cycle.  Each round jumps to the exact ratio
    of a witnessing cycle, so the result is an attained cycle ratio.
    """
    if not adj.any():
        raise NumericalError("graph has no edges")
    edges = np.argwhere(adj)
    if np.any(den[adj] <= 0):
        raise NumericalError("cycle-ratio denominators must be positive")
    r = min(num[u, v] / den[u, v] for u, v in edges) - 1.0
    scale = max(1.0, float(np.max(np.abs(num[adj]))) + float(np.max(np.abs(den[adj]))))
    best_cycle = None
    for _ in range(max_rounds):
        cyc = find_positive_cycle(adj, num - r * den, tol * scale)
        if cyc is None:
            if best_cycle is None:
                raise NumericalError("no cycle found above the initial ratio", bracket=(r, r))
            return float(r), best_cycle
        r_new = cycle_sum(num, cyc) / cycle_sum(den, cyc)
        if best_cycle is not None and r_new <= r:
            return float(r), best_cycle  # tolerance floor reached
        r, best_cycle = r_new, cyc
    raise NumericalError("cycle-ratio iteration did not settle", bracket=(r, r))


def min_cycle_ratio(adj: np.ndarray, num: np.ndarray, den: np.ndarray, **kw):
    r, cyc = max_cycle_ratio(adj, -num, den, **kw)
    return -r, cyc
