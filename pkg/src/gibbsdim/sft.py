"""Subshifts of finite type: alphabets, incidence tables and word combinatorics.

Words are plain tuples of symbol indices.  Symbol names exist only for I/O;
every table in the package is indexed by dense integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .errors import CapacityError, UnsupportedSpecError, ValidationError

Word = tuple  # tuple[int, ...]

EMPTY_WORD: Word = ()

DEFAULT_WORD_CAP = 10_000_000


def _wielandt_bound(n: int) -> int:
    # primitivity index of an n-state primitive matrix is at most (n-1)^2 + 1
    return (n - 1) * (n - 1) + 1


@dataclass(frozen=True, eq=False)
class SftSpec:
    """A one-sided shift space given by an ordered alphabet and an incidence table.

    ``incidence[a, b]`` is true when symbol ``b`` may follow symbol ``a``.
    Every row must allow at least one successor, so every finite admissible
    word extends to an infinite admissible sequence.
    """

    alphabet: tuple
    incidence: np.ndarray

    def __post_init__(self):
        alphabet = tuple(str(a) for a in self.alphabet)
        if len(alphabet) == 0:
            raise ValidationError("alphabet must be non-empty")
        if len(set(alphabet)) != len(alphabet):
            raise ValidationError("alphabet names must be distinct")
        inc = np.asarray(self.incidence, dtype=bool).copy()
        if inc.shape != (len(alphabet), len(alphabet)):
            raise ValidationError(
                f"incidence must be {len(alphabet)}x{len(alphabet)}, got {inc.shape}"
            )
        if not inc.any(axis=1).all():
            bad = [alphabet[i] for i in np.flatnonzero(~inc.any(axis=1))]
            raise ValidationError(f"every symbol needs a successor; rows {bad} are empty")
        inc.flags.writeable = False
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "incidence", inc)
        object.__setattr__(self, "_succ", tuple(
            tuple(int(b) for b in np.flatnonzero(inc[a])) for a in range(len(alphabet))
        ))
        object.__setattr__(self, "_prim_index", None)

    # --- identity -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SftSpec):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.incidence, other.incidence)

    def __hash__(self):
        return hash((self.alphabet, self.incidence.tobytes()))

    def __repr__(self):
        return f"SftSpec(|alphabet|={self.n}, alphabet={self.alphabet})"

    # --- basics ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.alphabet)

    def successors(self, a: int) -> tuple:
        return self._succ[a]

    def check_symbols(self, word: Word) -> None:
        for s in word:
            if not (isinstance(s, (int, np.integer)) and 0 <= s < self.n):
                raise ValidationError(f"symbol index {s!r} out of range for {self.n} symbols")

    def word(self, text: str) -> Word:
        """Parse a word from symbol names; comma-separated unless all names are single characters."""
        if text == "":
            return EMPTY_WORD
        parts = text.split(",") if "," in text else list(text)
        index = {name: i for i, name in enumerate(self.alphabet)}
        try:
            return tuple(index[p] for p in parts)
        except KeyError as exc:
            raise ValidationError(f"unknown symbol name {exc.args[0]!r}") from None

    def word_str(self, word: Word) -> str:
        self.check_symbols(word)
        names = [self.alphabet[s] for s in word]
        sep = "," if any(len(n) > 1 for n in names) else ""
        return sep.join(names)

    # --- admissibility ----------------------------------------------------

    def is_admissible(self, word: Word) -> bool:
        """True when every adjacent pair is allowed; empty and length-1 words qualify."""
        self.check_symbols(word)
        inc = self.incidence
        return all(inc[word[i], word[i + 1]] for i in range(len(word) - 1))

    def is_cyclically_admissible(self, word: Word) -> bool:
        """True when ``word + word`` is admissible, so arbitrary powers exist."""
        if len(word) == 0:
            raise ValidationError("cyclic admissibility is defined for non-empty words")
        return self.is_admissible(word) and bool(self.incidence[word[-1], word[0]])

    # --- mixing -----------------------------------------------------------

    def primitivity_index(self):
        """Least k with all entries of incidence^k positive, or None within the Wielandt bound."""
        cached = self._prim_index
        if cached is not None:
            return cached if cached > 0 else None
        reach = self.incidence.copy()
        result = None
        for k in range(1, _wielandt_bound(self.n) + 1):
            if reach.all():
                result = k
                break
            reach = (reach.astype(np.int64) @ self.incidence.astype(np.int64)) > 0
        object.__setattr__(self, "_prim_index", result if result is not None else -1)
        return result

    def is_mixing(self) -> bool:
        return self.primitivity_index() is not None

    def require_mixing(self) -> None:
        if not self.is_mixing():
            raise UnsupportedSpecError("operation requires a topologically mixing (primitive) spec")

    def mixing_window(self) -> int:
        """Least m >= 2 such that every symbol pair is joined by an admissible length-m word."""
        self.require_mixing()
        return self.primitivity_index() + 1

    # --- enumeration ------------------------------------------------------

    def count_words(self, n: int) -> int:
        """Number of admissible words of length n (exact integer arithmetic)."""
        if n < 0:
            raise ValidationError("word length must be non-negative")
        if n == 0:
            return 1
        counts = [1] * self.n
        for _ in range(n - 1):
            counts = [sum(counts[b] for b in self._succ[a]) for a in range(self.n)]
        return sum(counts)

    def words(self, n: int, cap: int = DEFAULT_WORD_CAP) -> list:
        """All admissible length-n words in lexicographic order."""
        if n < 0:
            raise ValidationError("word length must be non-negative")
        total = self.count_words(n)
        if total > cap:
            raise CapacityError(f"{total} admissible words of length {n} exceed the cap {cap}")
        if n == 0:
            return [EMPTY_WORD]
        out = []
        stack = [(a,) for a in range(self.n - 1, -1, -1)]
        while stack:
            w = stack.pop()
            if len(w) == n:
                out.append(w)
                continue
            for b in reversed(self._succ[w[-1]]):
                stack.append(w + (b,))
        return out

    # --- connecting words ---------------------------------------------------

    def connecting_words(self) -> "InfixSet":
        """For every symbol pair (a, b), the shortest (then lexicographically least)
        word rho with ``a rho b`` admissible."""
        self.require_mixing()
        n = self.n
        succ = self._succ
        pred = tuple(tuple(int(a) for a in np.flatnonzero(self.incidence[:, b])) for b in range(n))
        # dist_to[b][v] = least edge count of an admissible path v -> b
        dist_to = []
        for b in range(n):
            dist = [-1] * n
            frontier = [b]
            dist[b] = 0
            while frontier:
                nxt = []
                for v in frontier:
                    for u in pred[v]:
                        if dist[u] < 0:
                            dist[u] = dist[v] + 1
                            nxt.append(u)
                frontier = nxt
            dist_to.append(dist)
        table = {}
        for a in range(n):
            for b in range(n):
                best = min((dist_to[b][s] for s in succ[a] if dist_to[b][s] >= 0), default=-1)
                if best < 0:
                    raise UnsupportedSpecError(f"no admissible path joins {a} to {b}")
                rho = []
                cur, remaining = a, best + 1
                while remaining > 1:
                    cur = min(s for s in succ[cur] if dist_to[b][s] == remaining - 1)
                    rho.append(cur)
                    remaining -= 1
                table[(a, b)] = tuple(rho)
        return InfixSet(pairs=table)


@dataclass(frozen=True)
class InfixSet:
    """Connecting words: (a, b) -> rho with ``a rho b`` admissible."""

    pairs: dict

    def get(self, a: int, b: int) -> Word:
        return self.pairs[(a, b)]

    @property
    def words(self) -> tuple:
        return tuple(sorted(set(self.pairs.values()), key=lambda w: (len(w), w)))

    @property
    def norm(self) -> int:
        """Largest stored length."""
        return max((len(w) for w in self.pairs.values()), default=0)


def word_power(spec: SftSpec, word: Word, l: int) -> Word:
    """The l-fold concatenation of ``word``; the 0th power is the empty word."""
    if l < 0:
        raise ValidationError("power must be non-negative")
    spec.check_symbols(word)
    if l >= 2 and not spec.is_cyclically_admissible(word):
        raise ValidationError("repetition of a non-cyclically-admissible word is inadmissible")
    return word * l


@dataclass(frozen=True)
class BlockCoder:
    """Mutually inverse translations between a spec and its higher-block recoding."""

    base: SftSpec
    block: SftSpec
    width: int          # block length d-1
    blocks: tuple       # block index -> base word of length width

    def __post_init__(self):
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.blocks)})

    def encode(self, word: Word) -> Word:
        if len(word) < self.width:
            raise ValidationError(f"word shorter than block width {self.width}")
        if not self.base.is_admissible(word):
            raise ValidationError("cannot encode an inadmissible word")
        idx = self._index
        return tuple(idx[word[i:i + self.width]] for i in range(len(word) - self.width + 1))

    def decode(self, word: Word) -> Word:
        if len(word) == 0:
            return EMPTY_WORD
        self.block.check_symbols(word)
        out = list(self.blocks[word[0]])
        for b in word[1:]:
            out.append(self.blocks[b][-1])
        return tuple(out)


def higher_block_recode(spec: SftSpec, d: int, cap: int = DEFAULT_WORD_CAP):
    """Recode so that depth-d tables become edge (depth-2) tables.

    Symbols of the new spec are the admissible (d-1)-words of ``spec``; edges
    are overlaps.  Returns the new spec and the translation maps, which are
    mutually inverse on admissible objects.
    """
    if d < 2:
        raise ValidationError("recoding depth must be at least 2")
    spec.require_mixing()
    width = d - 1
    blocks = spec.words(width, cap=cap)
    m = len(blocks)
    inc = np.zeros((m, m), dtype=bool)
    for i, u in enumerate(blocks):
        for j, v in enumerate(blocks):
            if width > 1 and u[1:] != v[:-1]:
                continue
            inc[i, j] = spec.incidence[u[-1], v[-1]]
    names = tuple(spec.word_str(w) for w in blocks)
    block_spec = SftSpec(alphabet=names, incidence=inc)
    return block_spec, BlockCoder(base=spec, block=block_spec, width=width, blocks=tuple(blocks))
