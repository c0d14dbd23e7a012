import math

import numpy as np
import pytest

import helpers
from gibbsdim import (AffineIfs, CdfModel, InfeasibleError, LocallyConstantPotential,
                      ValidationError, beta, in_repetition_free_set, spectrum_at)

ALPHA0 = 1.2075187496394422


@pytest.fixture
def bin_model(ifs_bin, bin14):
    _, phi, _ = bin14
    return CdfModel(ifs_bin, phi)


@pytest.fixture
def lebesgue_model(ifs_bin, full2):
    half = LocallyConstantPotential.constant(full2, math.log(0.5))
    return CdfModel(ifs_bin, half)


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------

def test_cylinder_intervals(ifs_bin, full2):
    lo, hi = ifs_bin.cylinder_interval(full2.word("01"))
    assert (lo, hi) == (0.25, 0.5)
    assert ifs_bin.cylinder_interval(()) == (0.0, 1.0)
    for w in full2.words(5):
        plo, phi_ = ifs_bin.cylinder_interval(w[:-1])
        clo, chi = ifs_bin.cylinder_interval(w)
        assert plo - 1e-15 <= clo and chi <= phi_ + 1e-15


def test_open_set_condition_enforced(full2):
    with pytest.raises(ValidationError):
        AffineIfs(spec=full2, interval=(0.0, 1.0),
                  rates=np.array([0.6, 0.5]), offsets=np.array([0.0, 0.4]))
    with pytest.raises(ValidationError):
        AffineIfs(spec=full2, interval=(0.0, 1.0),
                  rates=np.array([0.5, 0.7]), offsets=np.array([0.0, 0.5]))


def test_coding_points(ifs_bin, full2):
    assert ifs_bin.coding_point((), full2.word("0")) == 0.0
    assert ifs_bin.coding_point((), full2.word("01")) == pytest.approx(1 / 3, abs=1e-15)
    assert ifs_bin.coding_point(full2.word("1"), full2.word("0")) == 0.5
    mid = ifs_bin.coding_point(full2.word("01"))
    assert 0.25 < mid < 0.5


def test_coding_respects_order(ifs_bin, full2):
    pts = [ifs_bin.coding_point(w) for w in full2.words(8)]
    assert pts == sorted(pts)


def test_geometric_potential(ifs_bin, full2):
    geo = ifs_bin.geometric_potential()
    assert geo.depth == 1
    assert geo.value(full2.word("0")) == pytest.approx(math.log(2.0), abs=1e-15)
    assert geo.min_value() > 0
    other = AffineIfs(spec=full2, interval=(0.0, 1.0),
                      rates=np.array([1 / 3, 2 / 3]), offsets=np.array([0.0, 1 / 3]))
    geo2 = other.geometric_potential()
    assert geo2.value(full2.word("1")) == pytest.approx(-math.log(2 / 3), abs=1e-15)


# --------------------------------------------------------------------------
# the distribution function
# --------------------------------------------------------------------------

def test_cdf_lebesgue_identity(lebesgue_model):
    for x in np.linspace(0.0, 1.0, 1000):
        assert lebesgue_model.cdf(float(x), 1e-9) == pytest.approx(float(x), abs=1e-9)


def test_cdf_oracles(bin_model):
    assert bin_model.cdf(0.5, 1e-9) == pytest.approx(0.25, abs=1e-9)
    assert bin_model.cdf(0.75, 1e-9) == pytest.approx(0.4375, abs=1e-9)
    assert bin_model.cdf(-0.5) == 0.0
    assert bin_model.cdf(1.5) == 1.0


def test_cdf_requires_positive_eps(bin_model):
    with pytest.raises(ValidationError):
        bin_model.cdf(0.5, 0.0)


def test_curve_monotone_with_unit_endpoints(bin_model):
    curve = bin_model.curve(257, 1e-10)
    ys = [y for _, y in curve]
    assert ys[0] == pytest.approx(0.0, abs=1e-9)
    assert ys[-1] == pytest.approx(1.0, abs=1e-12)
    assert all(a <= b + 1e-15 for a, b in zip(ys, ys[1:]))


def test_curve_refinement_consistent(bin_model):
    eps = 1e-10
    c1 = dict(bin_model.curve(101, eps))
    c2 = dict(bin_model.curve(201, eps))
    shared = set(c1) & set(c2)
    assert len(shared) >= 100
    for x in shared:
        assert abs(c1[x] - c2[x]) <= 2 * eps


def test_cdf_increment_equals_cylinder_mass(bin_model, full2):
    eps = 1e-11
    for n in range(1, 9):
        for w in full2.words(n):
            lo, hi = bin_model.ifs.cylinder_interval(w)
            inc = bin_model.cdf(hi, eps) - bin_model.cdf(lo, eps)
            assert inc == pytest.approx(bin_model.chain.cylinder_measure(w), abs=4 * eps)


def test_gibbs_sandwich(bin_model, full2):
    c = bin_model.gibbs_constant(8)
    for n in range(1, 13):
        for w in full2.words(n):
            lo, hi = bin_model.ifs.cylinder_interval(w)
            mu = bin_model.cdf(hi, 1e-13) - bin_model.cdf(lo, 1e-13)
            s = bin_model.potential.word_sum_bounds(w).sup
            assert mu <= c * math.exp(s) * (1 + 1e-6) + 1e-12
            assert mu >= math.exp(s) / c * (1 - 1e-6) - 1e-12


def test_depth2_potential_cdf(gold):
    # a genuinely two-step-memory measure pushed through a golden-spec IFS
    ifs = AffineIfs(spec=gold, interval=(0.0, 1.0),
                    rates=np.array([0.45, 0.45]), offsets=np.array([0.0, 0.55]))
    rng = np.random.default_rng(12)
    phi = helpers.random_potential(rng, gold, 2)
    model = CdfModel(ifs, phi)
    eps = 1e-11
    xs = np.linspace(0.0, 1.0, 200)
    ys = [model.cdf(float(x), eps) for x in xs]
    assert all(a <= b + 1e-14 for a, b in zip(ys, ys[1:]))
    for n in range(1, 7):
        for w in gold.words(n):
            lo, hi = ifs.cylinder_interval(w)
            inc = model.cdf(hi, eps) - model.cdf(lo, eps)
            assert inc == pytest.approx(model.chain.cylinder_measure(w), abs=5 * eps)


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------

def test_probe_exponent_at_periodic_point(bin_model):
    probe = bin_model.holder_probe(1 / 3, ALPHA0, 30)
    assert probe.exponent == pytest.approx(ALPHA0, abs=0.02)


def test_probe_power_law_at_left_endpoint(bin_model):
    probe = bin_model.holder_probe(0.0, 2.0, 30)
    # exact square law at 0 up to the evaluation tolerance floor
    assert probe.ratio_min >= 0.5
    assert probe.ratio_max <= 50.0


def test_probe_decay_off_exponent(bin_model):
    probe = bin_model.holder_probe(1 / 3, 1.0, 25)
    by_scale = {}
    for scale, _, _, ratio in probe.records:
        by_scale[scale] = max(by_scale.get(scale, 0.0), ratio)
    assert by_scale[2.0 ** -25] < by_scale[2.0 ** -5]


def test_moderate_checks(bin_model):
    assert bin_model.moderate_check(1 / 3, ALPHA0, 50.0, (5, 25))
    assert not bin_model.moderate_check(1 / 3, 1.0, 50.0, (5, 25))
    assert bin_model.moderate_check(0.0, 2.0, 50.0, (5, 30))
    with pytest.raises(ValidationError):
        bin_model.moderate_check(1 / 3, 1.0, 0.5, (5, 10))


def test_probe_consistency_at_fixed_points(bin_model, full2):
    # at the coded fixed point of symbol 1 the exponent is the cycle ratio
    x = bin_model.ifs.coding_point((), full2.word("1"))
    probe = bin_model.holder_probe(x, 1.0, 30)
    expect = -math.log(0.75) / math.log(2.0)
    assert probe.exponent == pytest.approx(expect, abs=0.02)


# --------------------------------------------------------------------------
# spectrum hooks and certified points
# --------------------------------------------------------------------------

def test_alpha0_report(bin_model, lebesgue_model):
    rep = bin_model.alpha0_report()
    assert rep["alpha0"] == pytest.approx(ALPHA0, abs=1e-9)
    assert rep["spectrum_value"] == pytest.approx(rep["beta0"], abs=1e-8)
    assert lebesgue_model.alpha0() == pytest.approx(1.0, abs=1e-10)


def test_certified_point_passes_moderate_check(bin_model):
    point = bin_model.certified_point(ALPHA0, l=12, depth=4, seed=0)
    assert point.certificate.passed
    assert bin_model.moderate_check(point.x, ALPHA0, 1e3, (5, 20))


def test_certified_point_repetition_freedom(bin_model, full2):
    point = bin_model.certified_point(ALPHA0, l=2, depth=4, seed=0)
    assert point.guaranteed_power > 0
    assert in_repetition_free_set(full2, point.word, point.pattern_words,
                                  point.guaranteed_power)
    assert point.window_constant == point.repetition_power * 1 + 2


def test_certified_point_sums_bounded(bin_model):
    point = bin_model.certified_point(ALPHA0, l=2, depth=5, seed=3)
    cert = point.certificate
    assert cert.prefix_ok
    assert cert.max_abs_prefix_sum <= cert.sum_bound


def test_certified_point_outside_range(bin_model):
    with pytest.raises(InfeasibleError):
        bin_model.certified_point(2.0)
    with pytest.raises(InfeasibleError):
        bin_model.certified_point(2.5)
