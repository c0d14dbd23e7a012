import math

import numpy as np
import pytest

import helpers
from gibbsdim import (InfeasibleError, ValidationError, add_constant,
                      build_mass_distribution, choose_base_length, combine,
                      full_dim_alpha, in_frequent_set, window_family)


def small_dist(phi_pm, s=0.1):
    _, pm, psi = phi_pm
    return build_mass_distribution(pm, psi, s, [pm.spec.word("01")])


# --------------------------------------------------------------------------
# base length selection
# --------------------------------------------------------------------------

def test_choose_base_length_worked_constants(phi_pm):
    _, pm, psi = phi_pm
    # overhead (2*0 + 5 + 2) * log 2 = 4.852, series value at m=1 is 6.238
    m = choose_base_length(pm, psi, 0.1, 0.6, postfix_norm=5, joined_len=2, infix_norm=0)
    assert m == 1
    value = (1 / 0.1) * math.log(2 * 2 ** -0.1)
    overhead = 7 * math.log(2)
    assert value == pytest.approx(6.2385, abs=1e-3)
    assert overhead == pytest.approx(4.8520, abs=1e-3)
    assert value > overhead


def test_choose_base_length_infeasible_above_dimension(phi_pm):
    _, pm, psi = phi_pm
    with pytest.raises(InfeasibleError):
        # at s >= 1 (the full dimension) the weighted series cannot diverge
        choose_base_length(pm, psi, 1.0, 0.6, 5, 2, 0, cap=12)


def test_series_value_monotone_on_doubling(phi_pm):
    _, pm, psi = phi_pm
    s, bound = 0.1, 1.0
    values = []
    for m in (1, 2, 4, 8):
        fam = window_family(pm, bound, m)
        total = sum(math.exp(-s * psi.word_sum_bounds(w).sup) for w in fam.words)
        values.append(math.log(total) / s)
    assert values == sorted(values)


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def test_build_phi_pm(phi_pm):
    dist = small_dist(phi_pm)
    assert dist.base_length == 1
    assert len(dist.family.words) == 2
    assert dist.band == pytest.approx(1.0)           # 2V + |R||phi| + 1
    assert dist.source_band == pytest.approx(2.0)    # K + (2|R| + |joined|)|phi|
    assert dist.postfix.norm == 5
    assert dist.joined == phi_pm[0].word("01")


def test_build_shifted_bernoulli(bin14):
    spec, phi, psi = bin14
    a0 = full_dim_alpha(phi, psi)
    phi_a = combine(1.0, phi, a0, psi)
    dist = build_mass_distribution(phi_a, psi, 0.3, [spec.word("0")])
    assert dist.family.words
    masses = [dist.mass(w) for w in dist.family.words]
    assert sum(masses) == pytest.approx(1.0, abs=1e-12)


def test_build_infeasible_one_sided(phi_neg):
    _, neg, psi = phi_neg
    with pytest.raises(InfeasibleError):
        build_mass_distribution(neg, psi, 0.1, [neg.spec.word("0")])


def test_build_rejects_s_at_dimension(phi_pm):
    _, pm, psi = phi_pm
    with pytest.raises(InfeasibleError):
        build_mass_distribution(pm, psi, 1.0, [pm.spec.word("01")])


# --------------------------------------------------------------------------
# masses
# --------------------------------------------------------------------------

def test_root_masses_symmetric(phi_pm):
    dist = small_dist(phi_pm)
    for w in dist.family.words:
        assert dist.mass(w) == pytest.approx(0.5, abs=1e-12)


def test_children_sum_to_parent(phi_pm):
    dist = small_dist(phi_pm)
    frontier = list(dist.family.words)
    for _ in range(3):
        nxt = []
        for parent in frontier:
            kids, _, _, _ = dist.children(parent)
            total = sum(dist.mass(k) for k in kids)
            assert total == pytest.approx(dist.mass(parent), rel=1e-12)
            nxt.extend(kids)
        frontier = nxt


def test_mass_replay_bit_identical(phi_pm):
    d1 = small_dist(phi_pm)
    d2 = small_dist(phi_pm)
    for k in (1, 2, 4):
        l1, l2 = d1.level(k), d2.level(k)
        assert l1.keys() == l2.keys()
        for w in l1:
            assert l1[w] == l2[w]  # exact equality, not approximate


def test_mass_rejects_foreign_words(phi_pm):
    dist = small_dist(phi_pm)
    with pytest.raises(ValidationError):
        dist.mass(phi_pm[0].word("0011"))


def test_levels_normalized_and_in_band(phi_pm):
    dist = small_dist(phi_pm)
    for k in range(1, 7):
        level = dist.level(k)
        assert sum(level.values()) == pytest.approx(1.0, rel=1e-12)
        for w in level:
            assert dist.phi.word_sum_bounds(w).within(dist.band)


def test_ratio_monotonicity_exhaustive(phi_pm):
    dist = small_dist(phi_pm)
    prev = None
    for k in range(1, 7):
        level = dist.level(k)
        worst = max(
            mass * math.exp(dist.s * dist.psi.word_sum_bounds(w).sup)
            for w, mass in level.items()
        )
        if prev is not None:
            assert worst <= prev * (1 + 1e-12)
        prev = worst


def test_mass_upper_bound_from_root_ratio(phi_pm):
    dist = small_dist(phi_pm)
    root_ratio = max(
        dist.mass(w) * math.exp(dist.s * dist.psi.word_sum_bounds(w).sup)
        for w in dist.family.words
    )
    for k in (2, 4, 6):
        for w, mass in dist.level(k).items():
            bound = math.exp(-dist.s * dist.psi.word_sum_bounds(w).sup) * root_ratio
            assert mass <= bound * (1 + 1e-12)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------

def test_sample_frequencies(phi_pm):
    dist = small_dist(phi_pm)
    counts = {w: 0 for w in dist.family.words}
    n = 10_000
    for seed in range(n):
        counts[dist.sample(1, seed)] += 1
    for w, c in counts.items():
        p = dist.mass(w)
        sigma = math.sqrt(p * (1 - p) * n)
        assert abs(c - p * n) <= 3 * sigma


def test_sample_deterministic_and_progressive(phi_pm):
    dist = small_dist(phi_pm)
    w5 = dist.sample(5, seed=9)
    assert dist.sample(5, seed=9) == w5
    w7 = dist.sample(7, seed=9)
    assert w7[:len(w5)] == w5  # deeper draws extend the same branch
    assert dist.phi.word_sum_bounds(w5).within(dist.band)


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

def test_certificate_contents(phi_pm):
    _, pm, psi = phi_pm
    dist = build_mass_distribution(pm, psi, 0.5, [pm.spec.word("01")])
    assert dist.prefix_sum_bound == pytest.approx(
        dist.source_band + dist.postfix.norm * pm.sup_norm())
    for seed in range(5):
        cert = dist.certify(dist.sample(5, seed))
        assert cert.passed
        assert cert.max_abs_prefix_sum <= cert.sum_bound
        assert cert.window_ok and cert.band_ok
        assert 0 < cert.mass < 1


def test_certificate_window_property(phi_pm):
    dist = small_dist(phi_pm)
    w = dist.sample(6, seed=1)
    assert in_frequent_set(w, [dist.joined], dist.window_length)


def test_certificate_local_dimension(phi_pm):
    _, pm, psi = phi_pm
    dist = build_mass_distribution(pm, psi, 0.5, [pm.spec.word("01")])
    for seed in range(10):
        cert = dist.certify(dist.sample(8, seed))
        assert cert.local_dim >= dist.s - 0.05
