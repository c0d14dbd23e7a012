"""Shared constructors and independent brute-force oracles for the tests.

Everything here is deliberately naive (itertools products, exhaustive DFS),
so the library's outputs are checked against implementations that share no
code path with them.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from gibbsdim import LocallyConstantPotential, SftSpec


def full2():
    return SftSpec(alphabet=("0", "1"), incidence=[[1, 1], [1, 1]])


def gold():
    return SftSpec(alphabet=("0", "1"), incidence=[[1, 1], [1, 0]])


def bin14():
    spec = full2()
    phi = LocallyConstantPotential.from_values(spec, [math.log(0.25), math.log(0.75)])
    psi = LocallyConstantPotential.constant(spec, math.log(2.0))
    return spec, phi, psi


def phi_pm():
    spec = full2()
    phi = LocallyConstantPotential.from_values(spec, [-0.5, 0.5])
    psi = LocallyConstantPotential.constant(spec, math.log(2.0))
    return spec, phi, psi


def phi_neg():
    spec = full2()
    phi = LocallyConstantPotential.from_values(spec, [-math.log(3.0), 0.0])
    psi = LocallyConstantPotential.constant(spec, 1.0)
    return spec, phi, psi


def gold_edge_potential():
    spec = gold()
    table = {spec.word("00"): 1.0, spec.word("01"): 2.0, spec.word("10"): -1.0}
    return spec, LocallyConstantPotential.from_table(spec, 2, table)


def random_mixing_spec(rng, n=None):
    n = int(n if n is not None else rng.integers(2, 6))
    inc = rng.random((n, n)) < 0.4
    for i in range(n):
        inc[i, (i + 1) % n] = True
    inc[0, 0] = True
    return SftSpec(alphabet=tuple(str(i) for i in range(n)), incidence=inc)


def random_potential(rng, spec, depth, scale=1.0, quantize=None):
    """Random table; with quantize=q the values are exact multiples of 1/q."""
    entries = []
    for w in spec.words(depth):
        v = float(rng.normal(0.0, scale))
        if quantize:
            v = round(v * quantize) / quantize
        entries.append((w, v))
    return LocallyConstantPotential.from_table(spec, depth, entries)


# --- brute-force oracles ----------------------------------------------------

def brute_words(spec, n):
    out = []
    for tup in itertools.product(range(spec.n), repeat=n):
        if spec.is_admissible(tup):
            out.append(tup)
    return out


def brute_extensions(spec, last, length):
    """All admissible continuations of ``length`` symbols after symbol ``last``."""
    if length == 0:
        return [()]
    out = []
    for tup in itertools.product(range(spec.n), repeat=length):
        if spec.incidence[last, tup[0]] and spec.is_admissible(tup):
            out.append(tup)
    return out


def brute_sum_range(phi, word):
    """Exact {S_len(xi): xi in [word]} bounds via exhaustive continuations."""
    spec, d = phi.spec, phi.depth
    values = []
    for ext in brute_extensions(spec, word[-1], d - 1) if d > 1 else [()]:
        seq = word + ext
        values.append(sum(phi.table[seq[k:k + d]] for k in range(len(word))))
    return max(values), min(values)


def brute_simple_cycles(adj):
    """All simple directed cycles as vertex tuples (start = minimal vertex)."""
    n = adj.shape[0]
    cycles = []

    def dfs(start, path, seen):
        u = path[-1]
        for v in range(n):
            if not adj[u, v]:
                continue
            if v == start:
                cycles.append(tuple(path))
            elif v > start and v not in seen:
                dfs(start, path + [v], seen | {v})

    for s in range(n):
        dfs(s, [s], {s})
    return cycles


def brute_cycle_ratio_range(adj, num, den):
    """Exact (min, max) cycle ratio using Fractions of the matrix entries."""
    lo, hi = None, None
    for cyc in brute_simple_cycles(adj):
        top = Fraction(0)
        bot = Fraction(0)
        for i, u in enumerate(cyc):
            v = cyc[(i + 1) % len(cyc)]
            top += Fraction(num[u, v]).limit_denominator(10**12)
            bot += Fraction(den[u, v]).limit_denominator(10**12)
        r = top / bot
        lo = r if lo is None else min(lo, r)
        hi = r if hi is None else max(hi, r)
    return float(lo), float(hi)


def brute_max_cycle_mean(adj, w):
    best = -math.inf
    for cyc in brute_simple_cycles(adj):
        total = sum(w[cyc[i], cyc[(i + 1) % len(cyc)]] for i in range(len(cyc)))
        best = max(best, total / len(cyc))
    return best


def edge_graph(phi):
    """Depth-2 edge view of a potential: (adjacency, weight matrix) on symbols."""
    assert phi.depth <= 2
    spec = phi.spec
    n = spec.n
    w = np.zeros((n, n))
    for a in range(n):
        for b in spec.successors(a):
            w[a, b] = phi.value((a, b))
    return spec.incidence, w
