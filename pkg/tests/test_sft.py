import numpy as np
import pytest

import helpers
from gibbsdim import (CapacityError, SftSpec, ValidationError, higher_block_recode,
                      word_power)


def test_admissibility(gold):
    assert not gold.is_admissible(gold.word("11"))
    assert gold.is_admissible(gold.word("010"))
    assert gold.is_admissible(())
    assert gold.is_admissible(gold.word("0"))


def test_symbol_range_validation(gold):
    with pytest.raises(ValidationError):
        gold.is_admissible((0, 2))


def test_cyclic_admissibility(gold, full2):
    assert not gold.is_cyclically_admissible(gold.word("1"))
    assert gold.is_cyclically_admissible(gold.word("01"))
    for text in ("0", "1", "01", "10", "0011"):
        assert full2.is_cyclically_admissible(full2.word(text))
    with pytest.raises(ValidationError):
        gold.is_cyclically_admissible(())


def test_mixing(full2, gold):
    assert full2.is_mixing()
    # A^2 of the golden spec is strictly positive
    a = np.array([[1, 1], [1, 0]])
    assert (a @ a > 0).all()
    assert gold.is_mixing()
    period2 = SftSpec(alphabet=("a", "b"), incidence=[[0, 1], [1, 0]])
    assert not period2.is_mixing()


def test_row_nonempty_invariant():
    with pytest.raises(ValidationError):
        SftSpec(alphabet=("a", "b"), incidence=[[1, 1], [0, 0]])


def test_connecting_words(full2, gold):
    r2 = full2.connecting_words()
    assert all(rho == () for rho in r2.pairs.values())
    assert r2.norm == 0
    rg = gold.connecting_words()
    assert rg.get(1, 1) == gold.word("0")
    assert rg.get(0, 1) == ()
    # every stored connector joins its pair admissibly
    for (a, b), rho in rg.pairs.items():
        assert gold.is_admissible((a,) + rho + (b,))


def test_connecting_words_shortest_lex(gold):
    # oracle: scan all candidate infixes by (length, lex) order
    rg = gold.connecting_words()
    for (a, b), rho in rg.pairs.items():
        found = None
        for n in range(0, 4):
            for cand in helpers.brute_words(gold, n):
                if gold.is_admissible((a,) + cand + (b,)):
                    found = cand
                    break
            if found is not None:
                break
        assert rho == found


def test_mixing_window(full2, gold):
    assert full2.mixing_window() == 2
    assert gold.mixing_window() == 3
    single = SftSpec(alphabet=("a",), incidence=[[1]])
    assert single.mixing_window() == 2
    # oracle for the golden spec: all pairs joined by length-3 words, not length-2
    for m, expect in ((2, False), (3, True)):
        ok = all(
            any(w[0] == a and w[-1] == b for w in helpers.brute_words(gold, m))
            for a in range(2) for b in range(2)
        )
        assert ok is expect


def test_enumerate_words(full2, gold):
    assert [gold.word_str(w) for w in gold.words(2)] == ["00", "01", "10"]
    assert len(full2.words(3)) == 8
    assert len(gold.words(5)) == 13  # Fibonacci count
    assert gold.words(0) == [()]


@pytest.mark.parametrize("n", range(0, 13))
def test_enumeration_matches_brute_force(gold, n):
    assert gold.words(n) == helpers.brute_words(gold, n)
    assert gold.count_words(n) == len(helpers.brute_words(gold, n))


def test_enumeration_three_symbols():
    rng = np.random.default_rng(7)
    spec = helpers.random_mixing_spec(rng, n=3)
    for n in range(0, 8):
        assert spec.words(n) == helpers.brute_words(spec, n)


def test_enumeration_cap(full2):
    with pytest.raises(CapacityError):
        full2.words(8, cap=100)


def test_word_power(full2, gold):
    assert word_power(full2, full2.word("01"), 3) == full2.word("010101")
    assert word_power(full2, full2.word("01"), 0) == ()
    assert word_power(gold, gold.word("1"), 1) == gold.word("1")
    with pytest.raises(ValidationError):
        word_power(gold, gold.word("1"), 2)


def test_junction_concatenation(gold):
    # admissibility of a concatenation is decided by the single junction pair
    rng = np.random.default_rng(3)
    words = [w for n in range(1, 6) for w in helpers.brute_words(gold, n)]
    for _ in range(200):
        u = words[rng.integers(len(words))]
        v = words[rng.integers(len(words))]
        assert gold.is_admissible(u + v) == bool(gold.incidence[u[-1], v[0]])


def test_higher_block_identity(full2):
    blocked, coder = higher_block_recode(full2, 2)
    assert blocked == full2
    w = full2.word("0110")
    assert coder.decode(coder.encode(w)) == w


def test_higher_block_gold(gold):
    blocked, coder = higher_block_recode(gold, 3)
    assert blocked.n == 3
    assert tuple(blocked.alphabet) == ("00", "01", "10")
    assert int(blocked.incidence.sum()) == 5
    # round trip on all length-6 words
    for w in gold.words(6):
        assert coder.decode(coder.encode(w)) == w
    # word counts are preserved: |words(n)| == |block words(n - d + 2)|
    for n in range(2, 10):
        assert len(gold.words(n)) == len(blocked.words(n - 1))


def test_higher_block_requires_depth(gold):
    with pytest.raises(ValidationError):
        higher_block_recode(gold, 1)


def test_higher_block_capacity(full2):
    with pytest.raises(CapacityError):
        higher_block_recode(full2, 12, cap=100)
