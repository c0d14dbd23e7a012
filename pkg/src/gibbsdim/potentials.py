"""Locally constant potentials: finite-depth value tables and their word sums.

A depth-d potential assigns a real value to every admissible d-word; as a
function on the shift space it reads the first d symbols.  All word sums,
suprema over cylinders and distortion constants below are exact, computed by
enumerating the d-1 overhanging continuation symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientContextError, ValidationError
from .sft import EMPTY_WORD, SftSpec, Word


@dataclass(frozen=True)
class WordSumBounds:
    """Exact sup and inf of the length-|word| Birkhoff sum over the cylinder [word]."""

    sup: float
    inf: float
    word: Word

    @property
    def width(self) -> float:
        return self.sup - self.inf

    def within(self, bound: float) -> bool:
        """sup of the absolute sum over the cylinder is at most ``bound``."""
        return self.sup <= bound and self.inf >= -bound


@dataclass(frozen=True, eq=False)
class LocallyConstantPotential:
    """Value table over the admissible depth-d words of a spec (units: nats)."""

    spec: SftSpec
    depth: int
    entries: tuple  # sorted tuple of (word, float)

    def __post_init__(self):
        if self.depth < 1:
            raise ValidationError("potential depth must be at least 1")
        entries = tuple(sorted((tuple(w), float(v)) for w, v in self.entries))
        required = self.spec.words(self.depth)
        keys = [w for w, _ in entries]
        if keys != required:
            missing = sorted(set(required) - set(keys))
            extra = sorted(set(keys) - set(required))
            raise ValidationError(
                "table must cover exactly the admissible depth-words"
                f" (missing {missing[:4]}, extra {extra[:4]})"
            )
        if not all(math.isfinite(v) for _, v in entries):
            raise ValidationError("potential values must be finite")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_table", dict(entries))
        object.__setattr__(self, "_distortion", None)

    # --- construction -----------------------------------------------------

    @classmethod
    def from_table(cls, spec: SftSpec, depth: int, table) -> "LocallyConstantPotential":
        items = table.items() if isinstance(table, dict) else table
        return cls(spec=spec, depth=depth, entries=tuple(items))

    @classmethod
    def from_values(cls, spec: SftSpec, values) -> "LocallyConstantPotential":
        """Depth-1 potential from one value per symbol."""
        values = list(values)
        if len(values) != spec.n:
            raise ValidationError("need one value per symbol")
        return cls(spec=spec, depth=1, entries=tuple(((a,), float(v)) for a, v in enumerate(values)))

    @classmethod
    def constant(cls, spec: SftSpec, c: float) -> "LocallyConstantPotential":
        return cls.from_values(spec, [c] * spec.n)

    # --- identity -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LocallyConstantPotential):
            return NotImplemented
        return (self.spec, self.depth, self.entries) == (other.spec, other.depth, other.entries)

    def __hash__(self):
        return hash((self.spec, self.depth, self.entries))

    def __repr__(self):
        return f"LocallyConstantPotential(depth={self.depth}, |table|={len(self.entries)})"

    # --- evaluation -----------------------------------------------------------

    @property
    def table(self) -> dict:
        return self._table

    def value(self, window: Word) -> float:
        """Value on the cylinder of ``window``; reads the first ``depth`` symbols."""
        if len(window) < self.depth:
            raise InsufficientContextError(
                f"need {self.depth} symbols to evaluate, got {len(window)}"
            )
        return self._table[window[: self.depth]]

    def sup_norm(self) -> float:
        return max(abs(v) for _, v in self.entries)

    def min_value(self) -> float:
        return min(v for _, v in self.entries)

    def max_value(self) -> float:
        return max(v for _, v in self.entries)

    def is_strictly_positive(self) -> bool:
        return self.min_value() > 0.0

    # --- Birkhoff and word sums -------------------------------------------

    def birkhoff_sum(self, prefix: Word, n: int) -> float:
        """Sum of the first n values along any sequence extending ``prefix``; exact."""
        if n < 0:
            raise ValidationError("Birkhoff sum length must be non-negative")
        if n == 0:
            return 0.0
        if len(prefix) < n + self.depth - 1:
            raise InsufficientContextError(
                f"prefix of length {len(prefix)} cannot determine {n} terms at depth {self.depth}"
            )
        if not self.spec.is_admissible(prefix):
            raise ValidationError("prefix is not admissible")
        d = self.depth
        return float(sum(self._table[prefix[k:k + d]] for k in range(n)))

    def _overhang_bounds(self, word: Word):
        """Sup and inf over admissible continuations of the windows sliding off ``word``."""
        d = self.depth
        if d == 1 or len(word) == 0:
            return 0.0, 0.0
        table = self._table
        succ = self.spec.successors
        full = len(word) + d - 1
        best = [math.inf, -math.inf]

        # extend by d-1 symbols; a window accrues once d symbols are in scope
        def walk(tail: Word, acc: float):
            if len(tail) == full:
                best[0] = min(best[0], acc)
                best[1] = max(best[1], acc)
                return
            for b in succ(tail[-1]):
                nt = tail + (b,)
                add = table[nt[-d:]] if len(nt) >= d else 0.0
                walk(nt, acc + add)

        walk(word, 0.0)
        return best[1], best[0]

    def word_sum_bounds(self, word: Word) -> WordSumBounds:
        """Exact sup/inf of the length-|word| Birkhoff sum over the cylinder [word]."""
        if not self.spec.is_admissible(word):
            raise ValidationError("word is not admissible")
        if len(word) == 0:
            return WordSumBounds(0.0, 0.0, word)
        d = self.depth
        base = sum(self._table[word[k:k + d]] for k in range(max(0, len(word) - d + 1)))
        hi, lo = self._overhang_bounds(word)
        return WordSumBounds(float(base + hi), float(base + lo), word)

    def distortion(self) -> float:
        """Uniform bound on |S_n(xi) - S_n(xi')| over pairs sharing an n-prefix; exact."""
        cached = self._distortion
        if cached is not None:
            return cached
        if self.depth == 1:
            value = 0.0
        else:
            value = 0.0
            for length in range(1, self.depth):
                for w in self.spec.words(length):
                    b = self.word_sum_bounds(w)
                    value = max(value, b.width)
        object.__setattr__(self, "_distortion", value)
        return value


def combine(a: float, f: LocallyConstantPotential, b: float,
            g: LocallyConstantPotential) -> LocallyConstantPotential:
    """The potential a*f + b*g, tabulated at the larger of the two depths."""
    if f.spec != g.spec:
        raise ValidationError("potentials live on different specs")
    depth = max(f.depth, g.depth)
    words = f.spec.words(depth)
    entries = tuple(
        (w, a * f.table[w[:f.depth]] + b * g.table[w[:g.depth]]) for w in words
    )
    return LocallyConstantPotential(spec=f.spec, depth=depth, entries=entries)


def add_constant(f: LocallyConstantPotential, c: float) -> LocallyConstantPotential:
    return combine(1.0, f, c, LocallyConstantPotential.constant(f.spec, 1.0))


def align_depth(f: LocallyConstantPotential, depth: int) -> LocallyConstantPotential:
    if depth < f.depth:
        raise ValidationError("cannot lower the depth of a table")
    if depth == f.depth:
        return f
    return LocallyConstantPotential(
        spec=f.spec, depth=depth,
        entries=tuple((w, f.table[w[:f.depth]]) for w in f.spec.words(depth)))


def d_psi(psi: LocallyConstantPotential, prefix1: Word, prefix2: Word) -> float:
    """Metric value exp(-S_{common block} psi) for points starting with the two prefixes.

    With psi identically 1 this is the standard exponential metric.
    """
    if not psi.is_strictly_positive():
        raise ValidationError("the metric potential must be strictly positive")
    for p in (prefix1, prefix2):
        if not psi.spec.is_admissible(p):
            raise ValidationError("prefixes must be admissible")
    k = 0
    while k < len(prefix1) and k < len(prefix2) and prefix1[k] == prefix2[k]:
        k += 1
    if k == len(prefix1) or k == len(prefix2):
        raise ValidationError(
            "prefixes do not separate the points at the available precision"
        )
    common = prefix1[:k]
    return math.exp(-psi.word_sum_bounds(common).sup)


def cylinder_diam_psi(psi: LocallyConstantPotential, word: Word) -> float:
    """Diameter of the cylinder [word] in the metric of ``psi``.

    Non-branching tails are resolved by extending the word to the first symbol
    with at least two admissible successors; a cylinder that never branches is
    a single point and has diameter 0.
    """
    if not psi.is_strictly_positive():
        raise ValidationError("the metric potential must be strictly positive")
    if len(word) == 0:
        return 1.0
    if not psi.spec.is_admissible(word):
        raise ValidationError("word is not admissible")
    spec = psi.spec
    w = word
    limit = len(word) + 2 * spec.n + psi.depth + 2
    while len(spec.successors(w[-1])) < 2:
        if len(w) > limit:
            return 0.0  # deterministic tail: the cylinder is a singleton
        w = w + (spec.successors(w[-1])[0],)
    return math.exp(-psi.word_sum_bounds(w).sup)
