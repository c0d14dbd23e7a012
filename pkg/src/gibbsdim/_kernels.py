"""Hot inner loops: Markov path sampling and CDF tree descent.

Both kernels are written as plain Python over NumPy arrays so the same code
either runs as-is (fallback) or compiled by numba.  Set

    GIBBSDIM_DISABLE_NUMBA=1

to force the pure-Python/NumPy path; the selected backend is reported in
``BACKEND``.  Randomness enters only through pre-drawn uniforms, so both
backends produce bit-identical results.
"""

from __future__ import annotations

import os

import numpy as np


def numba_disabled() -> bool:
    return os.environ.get("GIBBSDIM_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


def markov_path_py(start_cum, q_cum, u):
    """Sample a state path: u[0] picks the start, u[1:] drive the transitions."""
    m = u.shape[0]
    n = start_cum.shape[0]
    out = np.empty(m, dtype=np.int64)
    s = 0
    while s < n - 1 and u[0] > start_cum[s]:
        s += 1
    out[0] = s
    for k in range(1, m):
        x = u[k]
        t = 0
        while t < n - 1 and x > q_cum[s, t]:
            t += 1
        out[k] = t
        s = t
    return out


def cdf_descend_py(x, eps, max_depth, root_next, root_mass, succ, step_prob,
                   order, rates, offsets, u, v):
    """Mass of (-inf, x] under the pushforward measure, by cylinder descent.

    At each level, siblings lying entirely left of x contribute their full
    mass; the unique child containing x is entered (ties at shared endpoints
    count the left cylinder as passed).  Stops once the containing mass drops
    below eps, closing with a linear interpolation of the remainder.
    """
    acc = 0.0
    state = np.int64(-1)
    mass = 1.0
    s = 1.0
    t = 0.0
    for _ in range(max_depth):
        chosen = np.int64(-1)
        child_mass = 0.0
        cs = 1.0
        ct = 0.0
        for oi in range(order.shape[0]):
            b = order[oi]
            if state < 0:
                nxt = root_next[b]
                m = root_mass[b]
            else:
                nxt = succ[state, b]
                if nxt < 0:
                    continue
                m = mass * step_prob[state, b]
            s2 = s * rates[b]
            t2 = s * offsets[b] + t
            lo = s2 * u + t2
            hi = s2 * v + t2
            if hi <= x:
                acc += m
            elif lo <= x:
                chosen = nxt
                child_mass = m
                cs = s2
                ct = t2
        if chosen < 0:
            return acc  # x fell in a gap between sibling cylinders
        state = chosen
        mass = child_mass
        s = cs
        t = ct
        if mass < eps:
            break
    lo = s * u + t
    hi = s * v + t
    frac = (x - lo) / (hi - lo) if hi > lo else 0.5
    if frac < 0.0:
        frac = 0.0
    if frac > 1.0:
        frac = 1.0
    return acc + mass * frac


_PY_IMPLS = {"markov_path": markov_path_py, "cdf_descend": cdf_descend_py}
_JIT_IMPLS = None

if not numba_disabled():
    try:
        from numba import njit

        _JIT_IMPLS = {
            "markov_path": njit(cache=True)(markov_path_py),
            "cdf_descend": njit(cache=True)(cdf_descend_py),
        }
    except ImportError:
        _JIT_IMPLS = None

if _JIT_IMPLS is not None:
    BACKEND = "numba"
    markov_path = _JIT_IMPLS["markov_path"]
    cdf_descend = _JIT_IMPLS["cdf_descend"]
else:
    BACKEND = "numpy"
    markov_path = markov_path_py
    cdf_descend = cdf_descend_py
