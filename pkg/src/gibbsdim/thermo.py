"""Transfer operators, pressure, Gibbs chains, Birkhoff spectra and sub-actions.

Every potential is recoded to an edge (depth-2) table on a higher-block spec
before spectral work, so one dense-matrix code path serves all depths.  The
Legendre convention used throughout: with beta(q) the zero-pressure root and
q_alpha the solution of beta'(q) = alpha, the spectrum value is

    b(alpha) = min_q [beta(q) - q*alpha] = beta(q_alpha) - q_alpha*alpha,

which is the convention consistent with alpha = beta'(q_alpha); it is
validated against closed-form oracles in the test suite and recorded in all
emitted metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import cycles
from ._kernels import markov_path
from .errors import (CapacityError, EmptyLevelSetError, NumericalError,
                     ValidationError)
from .potentials import LocallyConstantPotential, combine
from .sft import BlockCoder, SftSpec, Word, higher_block_recode

PRESSURE_RTOL = 1e-13
PRESSURE_MAX_ITER = 500_000
BETA_PRESSURE_TOL = 1e-11
QALPHA_TOL = 1e-9
ALPHA_RANGE_TOL = 1e-10
Q_CAP = 40.0

LEGENDRE_CONVENTION = "b(alpha) = min_q beta(q) - q*alpha"


# --------------------------------------------------------------------------
# edge recoding shared by the spectral and word-family machinery
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EdgeSpace:
    """A spec recoded so the supplied potentials read at most one edge."""

    spec: SftSpec
    block_spec: SftSpec
    coder: BlockCoder
    adj: np.ndarray
    weights: tuple  # one (n, n) matrix per potential, 0 off-edges

    def matrix(self, coeffs) -> np.ndarray:
        w = np.zeros_like(self.weights[0])
        for c, mat in zip(coeffs, self.weights):
            w = w + c * mat
        return np.where(self.adj, np.exp(w), 0.0)

    def edge_mean(self, pi, Q, k: int) -> float:
        return float(np.sum(pi[:, None] * Q * self.weights[k]))


@lru_cache(maxsize=128)
def _edge_space(*potentials: LocallyConstantPotential) -> EdgeSpace:
    spec = potentials[0].spec
    for p in potentials[1:]:
        if p.spec != spec:
            raise ValidationError("potentials live on different specs")
    spec.require_mixing()
    depth = max(2, max(p.depth for p in potentials))
    block_spec, coder = higher_block_recode(spec, depth)
    n = block_spec.n
    adj = block_spec.incidence
    mats = [np.zeros((n, n)) for _ in potentials]
    for i in range(n):
        for j in range(n):
            if not adj[i, j]:
                continue
            word = coder.decode((i, j))
            for mat, p in zip(mats, potentials):
                mat[i, j] = p.value(word)
    for m in mats:
        m.flags.writeable = False
    return EdgeSpace(spec=spec, block_spec=block_spec, coder=coder, adj=adj,
                     weights=tuple(mats))


# --------------------------------------------------------------------------
# Perron data
# --------------------------------------------------------------------------

def _perron(M: np.ndarray, rtol: float = PRESSURE_RTOL, max_iter: int = PRESSURE_MAX_ITER):
    """Leading eigenvalue and positive eigenvector of a primitive matrix.

    Power iteration; every positive iterate yields a Collatz-Wielandt bracket
    [min_a (Mx)_a/x_a, max_a (Mx)_a/x_a] for the eigenvalue, and successive
    brackets are intersected until the certified width is below rtol.
    """
    x = np.ones(M.shape[0])
    lo_best, hi_best = 0.0, math.inf
    for _ in range(max_iter):
        y = M @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        lo_best = max(lo_best, lo)
        hi_best = min(hi_best, hi)
        if hi_best - lo_best <= rtol * hi_best:
            lam = 0.5 * (lo_best + hi_best)
            return lam, y / y.max(), (lo_best, hi_best)
        x = y / y.max()
    raise NumericalError(
        f"power iteration stalled; certified eigenvalue bracket {lo_best, hi_best}",
        bracket=(lo_best, hi_best),
    )


def _stochasticize(es: EdgeSpace, M: np.ndarray):
    """Perron data -> (lam, h, nu, Q, pi) with the normalizations used everywhere."""
    lam, h, _ = _perron(M)
    _, nu, _ = _perron(M.T)
    Q = M * h[None, :] / (lam * h[:, None])
    Q = Q / Q.sum(axis=1, keepdims=True)
    nu = nu / float(nu @ h)
    pi = nu * h
    pi = pi / pi.sum()
    return lam, h, nu, Q, pi


# --------------------------------------------------------------------------
# pressure and Gibbs chains
# --------------------------------------------------------------------------

def pressure(f: LocallyConstantPotential) -> float:
    """Topological pressure: log of the spectral radius of the weighted edge matrix."""
    es = _edge_space(f)
    lam, _, _ = _perron(es.matrix((1.0,)))
    return math.log(lam)


@dataclass(frozen=True, eq=False)
class GibbsChain:
    """Ruelle-Perron-Frobenius eigendata packaged as a stationary Markov chain.

    The chain realizes the equilibrium state of its potential: cylinder masses
    are pi(w1) * prod Q(w_i, w_{i+1}) over the higher-block path.
    """

    spec: SftSpec
    potential: LocallyConstantPotential
    block_spec: SftSpec
    coder: BlockCoder
    lam: float
    pressure: float
    h: np.ndarray
    nu: np.ndarray
    Q: np.ndarray
    pi: np.ndarray

    def _validate(self):
        M = _edge_space(self.potential).matrix((1.0,))
        lam = self.lam
        res_h = float(np.max(np.abs(M @ self.h - lam * self.h)))
        res_nu = float(np.max(np.abs(self.nu @ M - lam * self.nu)))
        if res_h > 1e-12 * lam * max(1.0, float(self.h.max())):
            raise NumericalError(f"right eigenvector residual {res_h:g} too large")
        if res_nu > 1e-12 * lam * max(1.0, float(self.nu.max())):
            raise NumericalError(f"left eigenvector residual {res_nu:g} too large")
        if np.any(self.h <= 0) or np.any(self.nu <= 0) or np.any(self.pi <= 0):
            raise NumericalError("eigendata must be strictly positive")
        if float(np.max(np.abs(self.Q.sum(axis=1) - 1.0))) > 1e-12:
            raise NumericalError("transition rows must sum to 1")
        if float(np.max(np.abs(self.pi @ self.Q - self.pi))) > 1e-12:
            raise NumericalError("stationary vector drifts under the transition table")
        if abs(float(self.nu @ self.h) - 1.0) > 1e-12:
            raise NumericalError("eigenvector normalization <nu, h> = 1 violated")

    # --- measures ---------------------------------------------------------

    def cylinder_measure(self, word: Word) -> float:
        """Exact equilibrium mass of the cylinder [word]."""
        if len(word) < 1:
            raise ValidationError("cylinder words must be non-empty")
        if not self.spec.is_admissible(word):
            raise ValidationError("word is not admissible")
        width = self.coder.width
        if len(word) < width:
            return float(sum(
                self.pi[i] for i, blk in enumerate(self.coder.blocks)
                if blk[:len(word)] == word
            ))
        path = self.coder.encode(word)
        mass = float(self.pi[path[0]])
        for a, b in zip(path, path[1:]):
            mass *= float(self.Q[a, b])
        return mass

    def integrate(self, g: LocallyConstantPotential) -> float:
        """Expectation of g under the stationary chain."""
        if g.spec != self.spec:
            raise ValidationError("potential lives on a different spec")
        depth = self.coder.width + 1
        if g.depth > depth:
            raise ValidationError(
                f"chain resolves depth {depth}; integrand has depth {g.depth}"
            )
        total = 0.0
        n = self.block_spec.n
        for i in range(n):
            for j in range(n):
                if self.block_spec.incidence[i, j]:
                    total += self.pi[i] * self.Q[i, j] * g.value(self.coder.decode((i, j)))
        return float(total)

    def gibbs_constant_bound(self, max_len: int, cap: int = 1_000_000) -> float:
        """Empirical two-sided Gibbs constant over cylinders up to max_len.

        Requires the potential normalized to zero pressure; the value is
        monotone non-decreasing in max_len.
        """
        if abs(self.pressure) > 1e-9:
            raise ValidationError(
                f"potential must be normalized to zero pressure (got {self.pressure:g})"
            )
        best = 1.0
        for n in range(1, max_len + 1):
            for w in self.spec.words(n, cap=cap):
                mu = self.cylinder_measure(w)
                ratio = mu / math.exp(self.potential.word_sum_bounds(w).sup)
                best = max(best, ratio, 1.0 / ratio)
        return best

    # --- sampling -----------------------------------------------------------

    def sample_orbit(self, n: int, seed: int) -> Word:
        """A length-n word drawn from the stationary chain; deterministic per seed."""
        if n < 1:
            raise ValidationError("orbit length must be positive")
        rng = np.random.default_rng(seed)
        width = self.coder.width
        steps = max(1, n - width + 1)
        u = rng.random(steps)
        start_cum = np.cumsum(self.pi)
        q_cum = np.cumsum(self.Q, axis=1)
        path = markov_path(start_cum, q_cum, u)
        return self.coder.decode(tuple(int(s) for s in path))[:n]


def gibbs_chain(f: LocallyConstantPotential) -> GibbsChain:
    """Eigendata of the weighted transfer matrix; the equilibrium state of f."""
    es = _edge_space(f)
    M = es.matrix((1.0,))
    lam, h, nu, Q, pi = _stochasticize(es, M)
    chain = GibbsChain(
        spec=f.spec, potential=f, block_spec=es.block_spec, coder=es.coder,
        lam=lam, pressure=math.log(lam), h=h, nu=nu, Q=Q, pi=pi,
    )
    chain._validate()
    return chain


def cylinder_measure(chain: GibbsChain, word: Word) -> float:
    return chain.cylinder_measure(word)


# --------------------------------------------------------------------------
# the pressure equation beta(q) and its Legendre transform
# --------------------------------------------------------------------------

def _pair_space(phi: LocallyConstantPotential, psi: LocallyConstantPotential) -> EdgeSpace:
    if not psi.is_strictly_positive():
        raise ValidationError("the metric potential must be strictly positive")
    return _edge_space(phi, psi)


def _pq_pressure(es: EdgeSpace, q: float, b: float) -> float:
    lam, _, _ = _perron(es.matrix((-q, -b)))
    return math.log(lam)


def _pq_chain(es: EdgeSpace, q: float, b: float):
    M = es.matrix((-q, -b))
    _, _, _, Q, pi = _stochasticize(es, M)
    return pi, Q


def beta(q: float, phi: LocallyConstantPotential, psi: LocallyConstantPotential) -> float:
    """The unique root b of P(-q*phi - b*psi) = 0.

    Pressure is strictly decreasing in b because psi is positive; monotone
    bisection brackets the root and Newton steps polish it to |P| <= 1e-11.
    """
    es = _pair_space(phi, psi)
    psi_min = psi.min_value()
    p0 = _pq_pressure(es, q, 0.0)
    if p0 >= 0.0:
        lo, hi = 0.0, p0 / psi_min + 1e-12
    else:
        lo, hi = p0 / psi_min - 1e-12, 0.0
    b = 0.5 * (lo + hi)
    for _ in range(200):
        p = _pq_pressure(es, q, b)
        if abs(p) <= BETA_PRESSURE_TOL:
            return b
        if p > 0:
            lo = b
        else:
            hi = b
        pi, Q = _pq_chain(es, q, b)
        nb = b + p / es.edge_mean(pi, Q, 1)
        if not (lo < nb < hi):
            nb = 0.5 * (lo + hi)
        b = nb
    raise NumericalError("pressure root iteration stalled", bracket=(lo, hi))


def beta_prime(q: float, phi: LocallyConstantPotential, psi: LocallyConstantPotential) -> float:
    """Derivative of beta: the Birkhoff ratio -int(phi)/int(psi) at the equilibrium of q."""
    es = _pair_space(phi, psi)
    b = beta(q, phi, psi)
    pi, Q = _pq_chain(es, q, b)
    return -es.edge_mean(pi, Q, 0) / es.edge_mean(pi, Q, 1)


def alpha_range(phi: LocallyConstantPotential, psi: LocallyConstantPotential):
    """Extreme asymptotic Birkhoff ratios -S(phi)/S(psi): extreme directed-cycle ratios."""
    es = _pair_space(phi, psi)
    num = -es.weights[0]
    den = es.weights[1]
    hi, _ = cycles.max_cycle_ratio(es.adj, num, den)
    lo_neg, _ = cycles.max_cycle_ratio(es.adj, -num, den)
    return (-lo_neg, hi)


@dataclass(frozen=True)
class SpectrumPoint:
    """One point of the dimension spectrum: alpha, its conjugate q, and the value."""

    alpha: float
    q_alpha: float          # +-inf at the endpoints
    value: float
    chain: GibbsChain
    endpoint: bool = False


def _chain_at_q(phi, psi, q: float) -> GibbsChain:
    b = beta(q, phi, psi)
    return gibbs_chain(combine(-q, phi, -b, psi))


def spectrum_at(alpha: float, phi: LocallyConstantPotential,
                psi: LocallyConstantPotential, q_cap: float = Q_CAP) -> SpectrumPoint:
    """Spectrum value b(alpha) = beta(q_alpha) - q_alpha*alpha.

    Interior alpha: q_alpha solves beta'(q) = alpha (monotone root find,
    |beta' - alpha| <= 1e-9).  At the endpoints of the attainable range the
    limiting value is approximated at |q| = q_cap, where convexity makes
    beta(q) - q*alpha monotone in |q|.
    """
    a_lo, a_hi = alpha_range(phi, psi)
    if alpha < a_lo - 1e-9 or alpha > a_hi + 1e-9:
        raise EmptyLevelSetError(
            f"ratio {alpha:g} outside the attainable range [{a_lo:.9g}, {a_hi:.9g}]"
        )

    def g(q):
        return beta_prime(q, phi, psi) - alpha

    g_hi = g(q_cap)
    g_lo = g(-q_cap)
    if g_lo >= 0.0:   # alpha at or below the ratio reachable at -q_cap
        value = beta(-q_cap, phi, psi) + q_cap * alpha
        chain = _chain_at_q(phi, psi, -q_cap)
        return SpectrumPoint(alpha, -math.inf, max(0.0, value), chain, endpoint=True)
    if g_hi <= 0.0:
        value = beta(q_cap, phi, psi) - q_cap * alpha
        chain = _chain_at_q(phi, psi, q_cap)
        return SpectrumPoint(alpha, math.inf, max(0.0, value), chain, endpoint=True)
    q_star = brentq(g, -q_cap, q_cap, xtol=1e-12, rtol=8.9e-16, maxiter=200)
    if abs(beta_prime(q_star, phi, psi) - alpha) > QALPHA_TOL:
        raise NumericalError("conjugate parameter did not meet tolerance",
                             bracket=(-q_cap, q_cap))
    value = beta(q_star, phi, psi) - q_star * alpha
    if -1e-9 < value < 0.0:
        value = 0.0
    return SpectrumPoint(alpha, float(q_star), value, _chain_at_q(phi, psi, q_star))


def full_dim_alpha(phi: LocallyConstantPotential, psi: LocallyConstantPotential) -> float:
    """The ratio alpha0 at which the spectrum attains the dimension of the whole space."""
    b0 = beta(0.0, phi, psi)
    chain = gibbs_chain(combine(0.0, phi, -b0, psi))
    return -chain.integrate(phi) / chain.integrate(psi)


# --------------------------------------------------------------------------
# ergodic optimization: sub-actions and one-sided Birkhoff suprema
# --------------------------------------------------------------------------

def _bellman_to_targets(adj: np.ndarray, w: np.ndarray, targets) -> np.ndarray:
    """Max weight of a walk from each vertex into ``targets`` (no positive cycles)."""
    n = adj.shape[0]
    f = np.full(n, -math.inf)
    f[list(targets)] = 0.0
    base = f.copy()
    for _ in range(n + 2):
        nxt = base.copy()
        for u in range(n):
            for vtx in range(n):
                if adj[u, vtx] and f[vtx] > -math.inf:
                    nxt[u] = max(nxt[u], w[u, vtx] + f[vtx])
        f = nxt
    return f


def subaction(phi: LocallyConstantPotential) -> dict:
    """A table f on (depth-1)-blocks with phi + f(next) - f(cur) <= 0 on every edge.

    Requires the maximal cycle mean of phi to vanish; equality then holds on
    the extracted critical cycle.  Computed as the longest-walk weight into
    that cycle (Bellman iteration; finite since no cycle is positive).
    """
    es = _edge_space(phi)
    w = es.weights[0]
    scale = max(1.0, phi.sup_norm())
    mean, cyc = cycles.karp_max_cycle_mean(es.adj, w)
    if abs(mean) > 1e-9 * scale:
        kind = "positive" if mean > 0 else "negative"
        raise ValidationError(
            f"sub-action requires zero maximal cycle mean; got {kind} mean {mean:g}"
        )
    f = _bellman_to_targets(es.adj, w, cyc)
    return {es.coder.blocks[i]: float(f[i]) for i in range(es.block_spec.n)}


def birkhoff_sup(phi: LocallyConstantPotential) -> float:
    """sup over sequences and n of the n-step Birkhoff sum; +inf iff a cycle is positive."""
    es = _edge_space(phi)
    w = es.weights[0]
    scale = max(1.0, phi.sup_norm())
    mean, _ = cycles.karp_max_cycle_mean(es.adj, w)
    if mean > 1e-12 * scale:
        return math.inf
    n = es.block_spec.n
    h = np.zeros(n)
    for _ in range(n + 2):
        nxt = np.zeros(n)
        for u in range(n):
            best = 0.0
            for vtx in range(n):
                if es.adj[u, vtx]:
                    best = max(best, w[u, vtx] + h[vtx])
            nxt[u] = best
        h = nxt
    best = -math.inf
    for u in range(n):
        for vtx in range(n):
            if es.adj[u, vtx]:
                best = max(best, w[u, vtx] + h[vtx])
    return float(best)
