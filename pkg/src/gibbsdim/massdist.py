"""The inductive bounded-sum word tree and the mass distribution it carries.

Generation 1 is a bounded-sum window family; every later generation extends a
parent by a connector, a fresh window word, a connector, the joined marker
word (which contains all requested pattern words), and a correcting postfix.
Masses follow the recursive exponential weighting in the metric potential and
are normalized within each sibling set, so they are consistent along the tree.

All choices (connectors, member order, postfix selection) are deterministic,
which makes masses reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (CapacityError, InfeasibleError, NumericalError,
                     ValidationError)
from .potentials import LocallyConstantPotential, cylinder_diam_psi
from .sft import EMPTY_WORD, InfixSet, SftSpec, Word
from .thermo import alpha_range, spectrum_at
from .wordsets import (PostfixSet, build_postfix_set, in_frequent_set,
                       window_family)

ALPHA_SIGN_TOL = 1e-9
DIM_MARGIN = 1e-3
BASE_LENGTH_CAP = 64


def _logsumexp(values) -> float:
    arr = np.asarray(values, dtype=float)
    m = float(arr.max())
    return m + math.log(float(np.exp(arr - m).sum()))


def choose_base_length(phi: LocallyConstantPotential, psi: LocallyConstantPotential,
                       s: float, bound: float, postfix_norm: int, joined_len: int,
                       infix_norm: int, cap: int = BASE_LENGTH_CAP) -> int:
    """Least base length m whose weighted window-family series beats the overhead.

    The criterion is (1/s) * log sum_{family} exp(-s * S_psi) > C0 with
    C0 = (2*|connectors| + |postfixes| + |joined|) * |psi|; feasible for every
    s below the spectrum value at ratio zero, where the full series diverges.
    """
    if s <= 0:
        raise ValidationError("dimension parameter must be positive")
    c0 = (2 * infix_norm + postfix_norm + joined_len) * psi.sup_norm()
    for m in range(1, cap + 1):
        fam = window_family(phi, bound, m)
        if not fam.words:
            continue
        logs = [-s * psi.word_sum_bounds(w).sup for w in fam.words]
        if _logsumexp(logs) / s > c0:
            return m
    raise InfeasibleError(
        f"no base length up to {cap} beats the overhead {c0:g};"
        " the dimension parameter is too close to the spectrum value"
    )


@dataclass(frozen=True)
class MassCertificate:
    """Desk-checkable facts about one tree word."""

    word: Word
    length: int
    sum_bound: float          # K' + |postfixes| * |phi|
    max_abs_prefix_sum: float
    prefix_ok: bool
    window_len: int
    window_ok: bool
    band_ok: bool             # cylinder sup |S phi| <= K
    mass: float
    log_mass: float
    log_diam: float
    local_dim: float

    @property
    def passed(self) -> bool:
        return self.prefix_ok and self.window_ok and self.band_ok

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "sum_bound": self.sum_bound,
            "max_abs_prefix_sum": self.max_abs_prefix_sum,
            "prefix_ok": self.prefix_ok,
            "window_len": self.window_len,
            "window_ok": self.window_ok,
            "band_ok": self.band_ok,
            "mass": self.mass,
            "log_mass": self.log_mass,
            "log_diam": self.log_diam,
            "local_dim": self.local_dim,
            "passed": self.passed,
        }


class MassDistribution:
    """Lazy tree of bounded-sum words with consistent cylinder masses."""

    def __init__(self, phi, psi, s, family, postfix, infixes, joined, pattern_words,
                 band, source_band, spectrum_value):
        self.phi: LocallyConstantPotential = phi
        self.psi: LocallyConstantPotential = psi
        self.spec: SftSpec = phi.spec
        self.s = float(s)
        self.family = family                  # WindowFamily (generation 1)
        self.postfix: PostfixSet = postfix
        self.infixes: InfixSet = infixes
        self.joined: Word = joined
        self.pattern_words = tuple(pattern_words)
        self.band = float(band)               # K
        self.source_band = float(source_band)  # K'
        self.spectrum_value = float(spectrum_value)
        self._children = {}
        logs = np.array([-self.s * psi.word_sum_bounds(w).sup for w in family.words])
        z = _logsumexp(logs)
        self._root_words = tuple(family.words)
        self._root_probs = np.exp(logs - z)
        self._root_logmass = {w: float(l - z) for w, l in zip(self._root_words, logs)}

    # --- structural constants -------------------------------------------

    @property
    def base_length(self) -> int:
        return self.family.length

    @property
    def prefix_sum_bound(self) -> float:
        return self.source_band + self.postfix.norm * self.phi.sup_norm()

    @property
    def window_length(self) -> int:
        return 2 * (self.base_length + self.infixes.norm + len(self.joined)) + self.postfix.norm

    # --- tree ------------------------------------------------------------

    def _child_stem(self, parent: Word, member: Word) -> Word:
        rho = self.infixes.get(parent[-1], member[0])
        rho2 = self.infixes.get(member[-1], self.joined[0])
        return parent + rho + member + rho2 + self.joined

    def _make_children(self, parent: Word):
        chosen = []
        for member in self._root_words:
            stem = self._child_stem(parent, member)
            pick = None
            for tau in self.postfix.words:
                if tau and not self.spec.incidence[stem[-1], tau[0]]:
                    continue
                cand = stem + tau
                if not self.phi.word_sum_bounds(cand).within(self.band):
                    continue
                clash = any(
                    cand[:len(o)] == o or o[:len(cand)] == cand for o in chosen
                )
                if clash:
                    continue
                pick = cand
                break
            if pick is None:
                raise NumericalError(
                    "no postfix returns a child into the band; "
                    f"parent length {len(parent)}, member {member}"
                )
            chosen.append(pick)
        logs = np.array([-self.s * self.psi.word_sum_bounds(c).sup for c in chosen])
        z = _logsumexp(logs)
        return tuple(chosen), np.exp(logs - z), logs - z, float(z)

    def children(self, parent: Word):
        key = tuple(parent)
        if key not in self._children:
            self._children[key] = self._make_children(key)
        return self._children[key]

    def _walk_to(self, word: Word):
        """Generation path from the root to ``word``; errors if it is not a node."""
        word = tuple(word)
        m = self.base_length
        if len(word) < m or word[:m] not in self._root_logmass:
            raise ValidationError("word is not a member of the tree")
        cur = word[:m]
        log_mass = self._root_logmass[cur]
        path = [cur]
        while cur != word:
            words, _, logcond, _ = self.children(cur)
            nxt = None
            for w, lc in zip(words, logcond):
                if word[:len(w)] == w and len(w) <= len(word):
                    nxt = (w, lc)
                    break
            if nxt is None:
                raise ValidationError("word is not a member of the tree")
            cur = nxt[0]
            log_mass += float(nxt[1])
            path.append(cur)
        return path, log_mass

    # --- masses ------------------------------------------------------------

    def log_mass(self, word: Word) -> float:
        _, lm = self._walk_to(word)
        return lm

    def mass(self, word: Word) -> float:
        return math.exp(self.log_mass(word))

    def level(self, k: int, cap: int = 200_000) -> dict:
        """All generation-k words with their masses (use only for small families)."""
        if k < 1:
            raise ValidationError("generation index must be positive")
        current = {w: self._root_logmass[w] for w in self._root_words}
        for _ in range(k - 1):
            nxt = {}
            for w, lm in current.items():
                words, _, logcond, _ = self.children(w)
                for c, lc in zip(words, logcond):
                    nxt[c] = lm + float(lc)
                if len(nxt) > cap:
                    raise CapacityError(f"generation exceeds cap {cap}")
            current = nxt
        return {w: math.exp(lm) for w, lm in current.items()}

    def sample(self, k: int, seed: int) -> Word:
        """Draw a generation-k word with probability equal to its mass."""
        if k < 1:
            raise ValidationError("generation index must be positive")
        rng = np.random.default_rng(seed)
        idx = int(np.searchsorted(np.cumsum(self._root_probs), rng.random(), side="left"))
        cur = self._root_words[min(idx, len(self._root_words) - 1)]
        for _ in range(k - 1):
            words, probs, _, _ = self.children(cur)
            j = int(np.searchsorted(np.cumsum(probs), rng.random(), side="left"))
            cur = words[min(j, len(words) - 1)]
        return cur

    # --- certificates ---------------------------------------------------------

    def certify(self, word: Word) -> MassCertificate:
        """Check the prefix-sum bound, the marker-window property and the band,
        and report the local dimension estimate of the word's cylinder."""
        path, log_mass = self._walk_to(word)
        d = self.phi.depth
        table = self.phi.table
        run, worst = 0.0, 0.0
        for k in range(len(word) - d + 1):
            run += table[word[k:k + d]]
            worst = max(worst, abs(run))
        bound = self.prefix_sum_bound
        wlen = self.window_length
        window_ok = in_frequent_set(word, [self.joined], wlen) if len(word) >= wlen else True
        band_ok = self.phi.word_sum_bounds(word).within(self.band)
        log_diam = math.log(cylinder_diam_psi(self.psi, word))
        local = log_mass / log_diam if log_diam < 0 else math.nan
        return MassCertificate(
            word=tuple(word), length=len(word), sum_bound=bound,
            max_abs_prefix_sum=worst, prefix_ok=worst <= bound + 1e-12,
            window_len=wlen, window_ok=window_ok, band_ok=band_ok,
            mass=math.exp(log_mass), log_mass=log_mass, log_diam=log_diam,
            local_dim=local,
        )


def build_mass_distribution(phi: LocallyConstantPotential,
                            psi: LocallyConstantPotential,
                            s: float, pattern_words, band: float = None,
                            base_length_cap: int = BASE_LENGTH_CAP) -> MassDistribution:
    """Assemble the tree: joined marker word, postfix family, base length, weights.

    Feasible when the cycle-ratio range of (phi, psi) straddles zero strictly
    and s stays below the spectrum value at ratio zero.
    """
    if phi.spec != psi.spec:
        raise ValidationError("potentials live on different specs")
    spec = phi.spec
    spec.require_mixing()
    a_lo, a_hi = alpha_range(phi, psi)
    if not (a_lo < -ALPHA_SIGN_TOL and a_hi > ALPHA_SIGN_TOL):
        raise InfeasibleError(
            f"cycle-ratio range ({a_lo:.9g}, {a_hi:.9g}) must straddle zero strictly"
        )
    b0 = spectrum_at(0.0, phi, psi).value
    if not 0.0 < s < b0 - DIM_MARGIN:
        raise InfeasibleError(
            f"dimension parameter must lie in (0, {b0 - DIM_MARGIN:.6g}); got {s:g}"
        )
    pattern = sorted(tuple(w) for w in pattern_words)
    if not pattern or any(len(w) == 0 for w in pattern):
        raise ValidationError("pattern words must be non-empty")
    for w in pattern:
        if not spec.is_admissible(w):
            raise ValidationError(f"pattern word {w} is not admissible")
    infixes = spec.connecting_words()
    joined = pattern[0]
    for w in pattern[1:]:
        joined = joined + infixes.get(joined[-1], w[0]) + w
    v_phi = phi.distortion()
    nrm = phi.sup_norm()
    if band is None:
        band = 2.0 * v_phi + infixes.norm * nrm + 1.0
    source_band = band + (2 * infixes.norm + len(joined)) * nrm
    postfix = build_postfix_set(phi, source_band, band)
    m = choose_base_length(phi, psi, s, band, postfix.norm, len(joined),
                           infixes.norm, cap=base_length_cap)
    family = window_family(phi, band, m)
    return MassDistribution(
        phi=phi, psi=psi, s=s, family=family, postfix=postfix, infixes=infixes,
        joined=joined, pattern_words=pattern, band=band, source_band=source_band,
        spectrum_value=b0,
    )
