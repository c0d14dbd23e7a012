"""Word families with bounded Birkhoff sums and the machinery built on them.

Covers: enumeration of the bounded-sum window families, the finite postfix
family that steers any bounded-sum word back into a tighter band, membership
checkers for the frequent-appearance and repetition-free sequence sets,
boundary words of an interval order, separating words, and the bounded-band
counterexample word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (CapacityError, InfeasibleError, NumericalError,
                     ValidationError)
from .potentials import LocallyConstantPotential, combine
from .sft import EMPTY_WORD, InfixSet, SftSpec, Word, word_power
from .thermo import _edge_space, alpha_range, birkhoff_sup

ALPHA_SIGN_TOL = 1e-9


# --------------------------------------------------------------------------
# bounded-sum window families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowFamily:
    """Admissible length-m words whose cylinder sup of |S_m phi| is at most K."""

    bound: float
    length: int
    words: tuple


def window_family(phi: LocallyConstantPotential, bound: float, length: int,
                  cap: int = 10_000_000) -> WindowFamily:
    """Enumerate the family by branch-and-bound over the word tree.

    Pruning uses exact extremal continuation sums (dynamic programs over the
    depth-overlap states), so the leaf test equals the exact cylinder bounds.
    """
    if bound <= 0:
        raise ValidationError("window bound must be positive")
    if length < 1:
        raise ValidationError("window length must be positive")
    spec = phi.spec
    d = phi.depth
    table = phi.table
    swidth = max(1, d - 1)
    states = spec.words(swidth)
    sid = {w: i for i, w in enumerate(states)}
    nstate = len(states)

    # step weight on appending symbol b to a word currently in state u
    def step(u_word: Word, b: int) -> float:
        w = (u_word + (b,))[-d:]
        return table[w] if len(w) == d else 0.0

    trans = [[None] * spec.n for _ in range(nstate)]
    for i, u in enumerate(states):
        for b in spec.successors(u[-1]):
            v = (u + (b,))[-swidth:]
            trans[i][b] = (sid[v], step(u, b))

    over_sup = np.zeros(nstate)
    over_inf = np.zeros(nstate)
    if d > 1:
        for i, u in enumerate(states):
            bnds = phi.word_sum_bounds(u)
            over_sup[i] = bnds.sup
            over_inf[i] = bnds.inf

    # minsup[r][u]: least achievable (continuation sum + final sup-overhang) in r steps
    minsup = [over_sup.copy()]
    maxinf = [over_inf.copy()]
    for _ in range(length):
        prev_ms, prev_mi = minsup[-1], maxinf[-1]
        ms = np.full(nstate, math.inf)
        mi = np.full(nstate, -math.inf)
        for i in range(nstate):
            for b in range(spec.n):
                tr = trans[i][b]
                if tr is None:
                    continue
                j, wv = tr
                ms[i] = min(ms[i], wv + prev_ms[j])
                mi[i] = max(mi[i], wv + prev_mi[j])
        minsup.append(ms)
        maxinf.append(mi)

    out = []

    def descend(word: Word, partial: float):
        j = len(word)
        if j >= swidth:
            state = sid[word[-swidth:]]
            r = length - j
            if partial + minsup[r][state] > bound or partial + maxinf[r][state] < -bound:
                return
            if j == length:
                sup = partial + over_sup[state]
                inf = partial + over_inf[state]
                if sup <= bound and inf >= -bound:
                    if len(out) >= cap:
                        raise CapacityError(f"window family exceeds cap {cap}")
                    out.append(word)
                return
        elif j == length:
            b = phi.word_sum_bounds(word)
            if b.within(bound):
                out.append(word)
            return
        start = word[-1] if word else None
        succ = spec.successors(start) if word else range(spec.n)
        for b in succ:
            nw = word + (b,)
            add = table[nw[-d:]] if len(nw) >= d else 0.0
            descend(nw, partial + add)

    descend(EMPTY_WORD, 0.0)
    return WindowFamily(bound=float(bound), length=length, words=tuple(out))


# --------------------------------------------------------------------------
# the postfix family
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PostfixSet:
    """Finite family T: every bounded-sum word admits some tau in T with the
    concatenation back inside the tighter band."""

    words: tuple          # sorted by (length, word); contains the empty word
    prefixes: tuple       # the raw segment prefixes plus the empty word
    seg_down: Word
    seg_up: Word
    band: float           # K
    source_band: float    # K'

    @property
    def norm(self) -> int:
        return max((len(w) for w in self.words), default=0)


def _extremal_word(phi: LocallyConstantPotential, threshold: float, minimize: bool,
                   step_cap: int = 100_000) -> Word:
    """Shortest word whose exact point Birkhoff sum passes the threshold.

    Walk DP on the edge recoding: the minimal (or maximal) weight of k-edge
    walks drifts linearly because some cycle ratio has the right sign.
    """
    es = _edge_space(phi)
    w = es.weights[0] if minimize else -es.weights[0]
    n = es.block_spec.n
    adj = es.adj
    d = np.zeros(n)
    parents = []
    for k in range(1, step_cap + 1):
        nd = np.full(n, math.inf)
        par = np.full(n, -1, dtype=np.int64)
        for u in range(n):
            for v in range(n):
                if adj[u, v] and d[u] + w[u, v] < nd[v]:
                    nd[v] = d[u] + w[u, v]
                    par[v] = u
        parents.append(par)
        d = nd
        if k >= 1 and float(d.min()) < -abs(threshold):
            v = int(np.argmin(d))
            path = [v]
            for back in range(k - 1, -1, -1):
                v = int(parents[back][v])
                path.append(v)
            path.reverse()
            word = es.coder.decode(tuple(path))
            return word[:k + phi.depth - 1]
    raise NumericalError(f"no walk passed the drift threshold within {step_cap} steps")


def build_postfix_set(phi: LocallyConstantPotential, source_band: float,
                      band: float) -> PostfixSet:
    """Construct the postfix family from two extremal drift segments.

    Hypotheses: the band exceeds 2*distortion + |connectors|*|phi|, and the
    cycle ratios of phi take both signs.  Both segments overshoot the source
    band (plus slack) so a first-crossing prefix lands any bounded-sum word
    back inside the tight band.
    """
    spec = phi.spec
    spec.require_mixing()
    infixes = spec.connecting_words()
    v_phi = phi.distortion()
    nrm = phi.sup_norm()
    if not band > 2.0 * v_phi + infixes.norm * nrm:
        raise InfeasibleError(
            f"band {band:g} must exceed 2*distortion + |connectors|*norm "
            f"= {2.0 * v_phi + infixes.norm * nrm:g}"
        )
    one = LocallyConstantPotential.constant(spec, 1.0)
    a_lo, a_hi = alpha_range(phi, one)
    if not (a_lo < -ALPHA_SIGN_TOL and a_hi > ALPHA_SIGN_TOL):
        raise InfeasibleError(
            f"drift in both directions required: cycle ratio range ({a_lo:g}, {a_hi:g})"
        )
    slack = source_band + 2.0 * v_phi + infixes.norm * nrm
    seg_down = _extremal_word(phi, slack, minimize=True)
    seg_up = _extremal_word(phi, slack, minimize=False)
    prefixes = {EMPTY_WORD}
    for seg in (seg_down, seg_up):
        for k in range(1, len(seg) + 1):
            prefixes.add(seg[:k])
    words = set()
    for rho in infixes.words:
        for tau in prefixes:
            cand = rho + tau
            if spec.is_admissible(cand):
                words.add(cand)
    key = lambda w: (len(w), w)
    return PostfixSet(
        words=tuple(sorted(words, key=key)),
        prefixes=tuple(sorted(prefixes, key=key)),
        seg_down=seg_down, seg_up=seg_up,
        band=float(band), source_band=float(source_band),
    )


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    max_len: int
    checked: int
    failures: tuple  # words with no working postfix

    def summary(self) -> str:
        state = "pass" if self.passed else f"FAIL ({len(self.failures)} witnesses)"
        return f"{state}: {self.checked} bounded-sum words up to length {self.max_len}"


def verify_postfix(pset: PostfixSet, phi: LocallyConstantPotential, max_len: int,
                   witness_cap: int = 32, cap: int = 10_000_000) -> VerifyReport:
    """Exhaustively check the postfix property for all source words up to max_len."""
    spec = phi.spec
    checked = 0
    failures = []
    for length in range(1, max_len + 1):
        for w in window_family(phi, pset.source_band, length, cap=cap).words:
            checked += 1
            ok = False
            for tau in pset.words:
                if tau and not spec.incidence[w[-1], tau[0]]:
                    continue
                if phi.word_sum_bounds(w + tau).within(pset.band):
                    ok = True
                    break
            if not ok and len(failures) < witness_cap:
                failures.append(w)
    return VerifyReport(passed=not failures, max_len=max_len, checked=checked,
                        failures=tuple(failures))


# --------------------------------------------------------------------------
# membership in the frequent-appearance and repetition-free sets
# --------------------------------------------------------------------------

def in_frequent_set(prefix: Word, words, k: int) -> bool:
    """True iff every length-k window inside the prefix contains every listed word."""
    fam = [tuple(w) for w in words]
    if any(len(w) == 0 for w in fam):
        raise ValidationError("family words must be non-empty")
    if any(len(w) > k for w in fam):
        raise ValidationError("window shorter than a family word; membership impossible")
    n = len(prefix)
    if n < k or not fam:
        return True
    text = bytes(prefix)
    for w in fam:
        pat = bytes(w)
        occ = []
        i = text.find(pat)
        while i >= 0:
            occ.append(i)
            i = text.find(pat, i + 1)
        ptr = 0
        for i in range(n - k + 1):
            while ptr < len(occ) and occ[ptr] < i:
                ptr += 1
            if ptr >= len(occ) or occ[ptr] > i + k - len(w):
                return False
    return True


def in_repetition_free_set(spec: SftSpec, prefix: Word, words, l: int) -> bool:
    """True iff no l-fold repetition of a listed word occurs in the prefix."""
    if l < 1:
        raise ValidationError("repetition count must be positive")
    fam = [tuple(w) for w in words]
    for w in fam:
        if len(w) == 0 or not spec.is_cyclically_admissible(w):
            raise ValidationError("family words must be non-empty and cyclically admissible")
    text = bytes(prefix)
    for w in fam:
        if text.find(bytes(word_power(spec, w, l))) >= 0:
            return False
    return True


# --------------------------------------------------------------------------
# boundary words of an interval order
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryWords:
    """Cycles of the leftmost/rightmost-successor maps induced by an interval order."""

    left_successor: dict
    right_successor: dict
    y_minus: tuple
    y_plus: tuple

    @property
    def all_words(self) -> tuple:
        return tuple(sorted(set(self.y_minus) | set(self.y_plus), key=lambda w: (len(w), w)))


def _functional_cycles(nxt) -> list:
    n = len(nxt)
    color = [0] * n
    cycles = []
    for start in range(n):
        if color[start]:
            continue
        path, pos = [], {}
        cur = start
        while color[cur] == 0 and cur not in pos:
            pos[cur] = len(path)
            path.append(cur)
            cur = nxt[cur]
        if cur in pos:
            cycles.append(tuple(path[pos[cur]:]))
        for v in path:
            color[v] = 1
    return cycles


def boundary_words(order, spec: SftSpec) -> BoundaryWords:
    """For each symbol the leftmost/rightmost admissible successor under ``order``,
    and all rotations of the cycles of those two successor maps."""
    order = tuple(order)
    if sorted(order) != list(range(spec.n)):
        raise ValidationError("order must be a permutation of the symbols")
    rank = {s: i for i, s in enumerate(order)}
    left = {a: min(spec.successors(a), key=lambda b: rank[b]) for a in range(spec.n)}
    right = {a: max(spec.successors(a), key=lambda b: rank[b]) for a in range(spec.n)}
    sets = []
    for nxt in (left, right):
        rotations = set()
        for cyc in _functional_cycles([nxt[a] for a in range(spec.n)]):
            for i in range(len(cyc)):
                rotations.add(cyc[i:] + cyc[:i])
        sets.append(tuple(sorted(rotations, key=lambda w: (len(w), w))))
    return BoundaryWords(left_successor=left, right_successor=right,
                         y_minus=sets[0], y_plus=sets[1])


# --------------------------------------------------------------------------
# separating words and the counterexample construction
# --------------------------------------------------------------------------

def separating_word(spec: SftSpec, words, max_len: int = 64) -> Word:
    """Shortest admissible word that is a prefix of no shift of any listed word's
    infinite repetition, so its cylinder misses all those periodic orbits."""
    fam = [tuple(w) for w in words]
    for w in fam:
        if len(w) == 0 or not spec.is_cyclically_admissible(w):
            raise ValidationError("family words must be non-empty and cyclically admissible")
    rotations = {w[i:] + w[:i] for w in fam for i in range(len(w))}
    for length in range(1, max_len + 1):
        forbidden = set()
        for rot in rotations:
            reps = -(-length // len(rot))
            forbidden.add((rot * reps)[:length])
        for cand in spec.words(length):
            if cand not in forbidden:
                return cand
    raise CapacityError(f"no separating word of length <= {max_len}")


def counterexample_word(phi: LocallyConstantPotential,
                        psi: LocallyConstantPotential) -> Word:
    """A cyclically admissible word forcing unbounded Birkhoff drift along any
    sequence that repeats it frequently.

    Applies when exactly one end of the cycle-ratio range sits at zero; the
    mirrored case is handled by negating the potential.  The word's cylinder
    sup sum lies strictly below -(one-sided supremum) - 1.
    """
    spec = phi.spec
    spec.require_mixing()
    a_lo, a_hi = alpha_range(phi, psi)
    if abs(a_lo) <= ALPHA_SIGN_TOL and a_hi > ALPHA_SIGN_TOL:
        base = phi
    elif abs(a_hi) <= ALPHA_SIGN_TOL and a_lo < -ALPHA_SIGN_TOL:
        base = combine(-1.0, phi, 0.0, phi)
    else:
        raise InfeasibleError(
            f"needs a zero endpoint in the cycle-ratio range; got ({a_lo:.9g}, {a_hi:.9g})"
        )
    c_minus = birkhoff_sup(base)
    if not math.isfinite(c_minus):
        raise NumericalError("one-sided Birkhoff supremum should be finite here")
    infixes = spec.connecting_words()
    margin = base.distortion() + (infixes.norm + base.depth - 1) * base.sup_norm()
    threshold = margin + c_minus + 1.0
    for _ in range(12):
        seg = _extremal_word(base, threshold, minimize=True)
        rho = infixes.get(seg[-1], seg[0])
        word = seg + rho
        if base.word_sum_bounds(word).sup < -c_minus - 1.0:
            return word
        threshold += 1.0 + base.sup_norm()
    raise NumericalError("drift word construction did not close")
