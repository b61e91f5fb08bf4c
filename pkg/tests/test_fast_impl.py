"""Disk generation, seed pairs, certification and the implementation pipeline."""
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from hardcore_ratios.errors import DegenerateSeed, DomainError, GeometryPrecondition, SearchFailed, WrongBranch
from hardcore_ratios.exact_arith import GaussianRational, PointLocation, RationalDisk, disk_in_disk
from hardcore_ratios.fast_impl import (
    Certificate,
    FastImplementer,
    ImplementerPair,
    SectorSpec,
    close_to_p,
    design_geometry,
    dyadic_inner_disk,
    emit_tree,
    fast_into_d1,
    generate_disk,
    quickly_to_zi,
    replay_plan,
    run_fast_implementation,
    search_fast_implementer,
    seed_pair,
    seed_residuals,
)
from hardcore_ratios.fast_impl.sector import rational_seed_pair
from hardcore_ratios.fast_impl.sources import CatalogPairSource, PairSourceManager
from hardcore_ratios.fast_impl.sources.cover import pull_back, word_derivative, word_value
from hardcore_ratios.graph_core import enumerate_catalog, ratio, tree_partition
from hardcore_ratios.moebius import disk_image, g_map

LAMBDA0 = GaussianRational(-1, 1)
UNIT = RationalDisk.from_center_radius(0, 1)
CONDITIONS = {
    "fixed_points_in_disk",
    "cover",
    "derivative_in_sector",
    "disk_inside_own_image",
    "attracting_point_excluded",
    "rational_boundary",
}


# --- Disk generation ---
def test_generate_disk_two_quarter_points():
    b = RationalDisk.from_center_radius(GaussianRational(Fraction(1, 2), Fraction(1, 2)), Fraction(3, 4))
    d = generate_disk(UNIT, b)
    assert d.center == GaussianRational(Fraction(3, 8), Fraction(3, 8))
    assert d.radius_squared == Fraction(1, 32)


def test_generate_disk_one_quarter_point():
    b = RationalDisk.from_center_radius(1, Fraction(11, 10))
    d = generate_disk(UNIT, b)
    assert d.center == GaussianRational(Fraction(3, 4))
    assert d.radius_squared == Fraction(1, 16)


def test_generate_disk_inside_larger_disk():
    d = generate_disk(UNIT, RationalDisk.from_center_radius(0, 2))
    assert d.radius_squared == Fraction(1, 32)
    assert disk_in_disk(d, UNIT)


def test_generate_disk_preconditions():
    with pytest.raises(GeometryPrecondition):
        generate_disk(UNIT, RationalDisk.from_center_radius(2, 1))
    with pytest.raises(GeometryPrecondition):
        generate_disk(UNIT, RationalDisk.from_center_radius(Fraction(1, 4), Fraction(1, 2)))


def _random_pair(rng):
    while True:
        ra = Fraction(rng.randint(1, 64), rng.randint(1, 64))
        rb = ra * Fraction(rng.randint(30, 400), 100)
        x, y = Fraction(rng.randint(-99, 99), 100), Fraction(rng.randint(-99, 99), 100)
        if x * x + y * y >= 1:
            continue
        ca = GaussianRational(Fraction(rng.randint(-50, 50), rng.randint(1, 9)), Fraction(rng.randint(-50, 50), rng.randint(1, 9)))
        a = RationalDisk.from_center_radius(ca, ra)
        b = RationalDisk.from_center_radius(ca + GaussianRational(rb * x, rb * y), rb)
        if not disk_in_disk(b, a):
            return a, b


def _check_generated(a, b):
    d = generate_disk(a, b)
    assert disk_in_disk(d, a)
    assert disk_in_disk(d, b)
    assert 128 * d.radius_squared >= a.radius_squared


def test_generate_disk_contract(rng):
    for _ in range(300):
        _check_generated(*_random_pair(rng))


@pytest.mark.slow
def test_generate_disk_contract_sweep(rng):
    for _ in range(10_000):
        _check_generated(*_random_pair(rng))


def test_dyadic_inner_disk(rng):
    for _ in range(100):
        a, b = _random_pair(rng)
        d = generate_disk(a, b)
        rounded = dyadic_inner_disk(d)
        assert disk_in_disk(rounded, d)
        assert 2 * rounded.radius_squared >= d.radius_squared
        den = rounded.center.re.denominator
        assert (den & (den - 1)) == 0 or rounded == d


# --- Seeds and sectors ---
ALPHA = SectorSpec().midpoint()


def test_seed_pair_residuals():
    z0 = GaussianRational(Fraction(1, 2), Fraction(1, 3))
    mu, chi = seed_pair(z0, ALPHA)
    fixed, slope = seed_residuals(z0, ALPHA, mu, chi)
    assert fixed < mp.mpf(2) ** -200
    assert slope < mp.mpf(2) ** -200


@pytest.mark.parametrize("z0", [GaussianRational(0), GaussianRational(-1)], ids=str)
def test_seed_pair_excluded_points(z0):
    with pytest.raises(DegenerateSeed):
        seed_pair(z0, ALPHA)


def test_seed_pair_degenerate_targets():
    z0 = GaussianRational(1, 1)
    with pytest.raises(DegenerateSeed):
        seed_pair(z0, 0)
    with mp.workprec(256):
        boundary = z0.to_mpc() / (z0.to_mpc() + 1)
    with pytest.raises(DegenerateSeed):
        seed_pair(z0, boundary)


def test_rational_seed_pair_keeps_exact_fixed_point():
    z = GaussianRational(Fraction(-3, 4), Fraction(-5, 4))
    mu, chi = rational_seed_pair(z, ALPHA, 64)
    assert g_map(mu, chi)(z) == z


def test_sector():
    sector = SectorSpec()
    assert sector.contains(GaussianRational.from_complex(ALPHA, 64))
    assert not sector.contains(GaussianRational(Fraction(1, 16)))
    assert not sector.contains(GaussianRational.from_complex(ALPHA * 2, 64))
    assert sector.float_contains(complex(ALPHA))
    assert not sector.float_contains(0)


def test_geometry():
    geometry = design_geometry(LAMBDA0)
    assert geometry.disk.center == GaussianRational(-1, -1)
    assert geometry.disk.radius_squared == Fraction(1, 2**24)
    assert geometry.targets[0] == geometry.disk.center
    assert all(geometry.disk.locate(t) is PointLocation.INSIDE for t in geometry.targets)
    assert 1000 < len(geometry.targets) < 3000


# --- Certification ---
def test_certificate(implementer):
    certificate = implementer.certificate
    assert certificate.passed
    assert {c.name for c in certificate.checks} == CONDITIONS
    assert Certificate.from_json(certificate.to_json()) == certificate
    assert implementer.certified
    assert not implementer.has_trees


def test_implementer_json(implementer):
    restored = FastImplementer.from_json(implementer.to_json())
    assert restored.lambda0 == LAMBDA0
    assert restored.disk == implementer.disk
    assert [p.mu for p in restored.pairs] == [p.mu for p in implementer.pairs]
    assert restored.certified


def test_attractor_geometry(implementer):
    geo = implementer.attractor
    assert geo.a == GaussianRational(0, 1)
    assert geo.a_exact
    assert geo.gap > 0
    for outer, inner in zip(geo.disks, geo.disks[1:]):
        assert disk_in_disk(inner, outer, strict=True)
    assert geo.disks[0].locate(geo.a) is PointLocation.INSIDE


# --- Pipeline stages ---
def test_quickly_to_zi(implementer):
    pair = implementer.pairs[0]
    eps = Fraction(1, 10**6)
    k = quickly_to_zi(implementer, 0, pair.z_fix, eps)
    z = GaussianRational(0)
    for _ in range(k):
        z = pair.g(z)
    assert (z - pair.z_fix).norm() < eps * eps
    with pytest.raises(DomainError):
        quickly_to_zi(implementer, 0, pair.z_fix + 1, eps)


def test_quickly_to_zi_resolves_irrational_fixed_points():
    mu, chi = rational_seed_pair(GaussianRational(-1, -1), ALPHA, 64)
    pair = ImplementerPair.from_values(mu, chi + GaussianRational(Fraction(1, 2**40)))
    imp = FastImplementer(LAMBDA0, 3, (pair,), design_geometry(LAMBDA0).disk)
    eps = Fraction(1, 2**140)
    q = pair.fixed_point(220)
    k = quickly_to_zi(imp, 0, q, eps)
    w = GaussianRational(0)
    for _ in range(k):
        w = pair.g(w)
    assert (w - q).norm() < eps * eps


def test_quickly_to_zi_needs_target_disk_in_u(implementer):
    pair = implementer.pairs[0]
    with pytest.raises(GeometryPrecondition):
        quickly_to_zi(implementer, 0, pair.z_fix, Fraction(1, 100))


def test_fast_into_d1(implementer):
    u = implementer.disk
    r = Fraction(1, 2**12)
    d1 = RationalDisk.from_center_radius(u.center + GaussianRational(r / 3, -r / 5), r / 10**4)
    i, chosen, dk = fast_into_d1(implementer, d1)
    assert dk.locate(implementer.pairs[i].z_fix) is PointLocation.INSIDE
    image = dk
    for j in reversed(chosen):
        image = disk_image(implementer.pairs[j].g, image)
    assert disk_in_disk(image, d1)
    with pytest.raises(GeometryPrecondition):
        fast_into_d1(implementer, RationalDisk.from_center_radius(0, r))


def test_close_to_p_rejects_attracting_point(implementer):
    with pytest.raises(WrongBranch):
        close_to_p(implementer, GaussianRational(0, 1), Fraction(1, 100))


@pytest.mark.parametrize(
    "target",
    [
        GaussianRational(3, 2),
        GaussianRational(Fraction(-5, 2), 4),
        GaussianRational(Fraction(1, 7)),
        GaussianRational(-4, -4),
        GaussianRational(0, Fraction(3, 2)),
    ],
    ids=str,
)
def test_far_targets(implementer, target):
    eps = Fraction(1, 10**6)
    plan = run_fast_implementation(implementer, target, eps)
    assert plan.branch == "far"
    assert plan.labels[-1] == LAMBDA0
    assert (replay_plan(plan) - target).norm() < eps * eps
    stages = plan.stages
    assert len(plan) == 2 * stages["K3"] + 2 * stages["K2"] + stages["K1"]
    assert plan.to_json()["K"] == len(plan)


def test_near_target(implementer):
    target = GaussianRational(Fraction(1, 10**8), 1)
    eps = Fraction(1, 1000)
    plan = run_fast_implementation(implementer, target, eps)
    assert plan.branch == "near"
    assert set(plan.labels) == {LAMBDA0}
    assert (replay_plan(plan) - target).norm() < eps * eps


@pytest.mark.slow
def test_plan_length_grows_with_log_eps(implementer):
    target = GaussianRational(2, -1)
    coarse = len(run_fast_implementation(implementer, target, Fraction(1, 100)))
    fine = len(run_fast_implementation(implementer, target, Fraction(1, 10**10)))
    assert coarse <= fine <= coarse + 40 * 8


def test_pipeline_preconditions(implementer):
    uncertified = FastImplementer(LAMBDA0, 3, implementer.pairs, implementer.disk)
    with pytest.raises(DomainError):
        run_fast_implementation(uncertified, GaussianRational(1), Fraction(1, 10))
    with pytest.raises(DomainError):
        run_fast_implementation(implementer, GaussianRational(1), 0)


def test_value_only_implementer_has_no_tree(implementer):
    plan = run_fast_implementation(implementer, GaussianRational(1), Fraction(1, 100))
    with pytest.raises(DomainError):
        emit_tree(plan, implementer)


# --- Search ---
def test_search_rejects_bad_inputs():
    with pytest.raises(SearchFailed):
        search_fast_implementer(LAMBDA0, 3, budget=0)
    with pytest.raises(SearchFailed) as info:
        search_fast_implementer(GaussianRational(Fraction(1, 100)), 3)
    assert "shearer_margin" in info.value.diagnostics


def test_catalog_source_values_match_trees():
    source = CatalogPairSource({"max_vertices": 6})
    source.prepare(LAMBDA0, 3, None)
    for t in (0.3 + 0.2j, -1.5 + 0.75j, 2j):
        dist, blocks, index = source.lookup(t)
        value = source._exact_value(blocks, index)
        assert value is not None
        assert ratio(source._tree(blocks, index), LAMBDA0) == value
        assert abs(value.to_complex() - t) == pytest.approx(dist, rel=1e-6, abs=1e-12)
    with pytest.raises(DomainError):
        source.prepare(LAMBDA0, 3, enumerate_catalog(3, GaussianRational(1, 1), 4))


def test_search_reports_diagnostics():
    catalog = enumerate_catalog(3, LAMBDA0, 6)
    with pytest.raises(SearchFailed) as info:
        search_fast_implementer(LAMBDA0, 3, catalog, budget=50, source=CatalogPairSource({}))
    diagnostics = info.value.diagnostics
    assert diagnostics["source"] == "catalog"
    assert diagnostics["spent"] >= 50


def test_pair_sources_take_the_run_seed():
    manager = PairSourceManager({"pair_sources": {"catalog": {"max_vertices": 6}, "seed": {}}}, seed=7)
    assert {s.seed for s in manager.get_all_sources()} == {7}
    draws = [PairSourceManager({}, seed=7).get_source("catalog").rng.random() for _ in range(2)]
    assert draws[0] == draws[1]
    assert PairSourceManager({}).get_source("catalog").seed == 0


# --- Refinement through contracting covers ---
def test_word_helpers():
    ratios = [complex(-1, 1), complex(1, 1), complex(-0.2, 0.6)]
    blocks = (2, 0, 1)
    y = 0.3 + 0.1j
    t = word_value(ratios, blocks, y)
    assert pull_back(ratios, blocks, t) == pytest.approx(y, abs=1e-12)
    h = 1e-7
    numeric = abs(word_value(ratios, blocks, y + h) - t) / h
    assert word_derivative(ratios, blocks, y) == pytest.approx(numeric, rel=1e-4)


def _seed_values():
    mu, chi = seed_pair(GaussianRational(-1, -1), ALPHA)
    return complex(mu), complex(chi)


@pytest.mark.slow
def test_catalog_cover_contracts(catalog_source):
    cover = catalog_source.cover
    assert cover is not None
    assert float(cover.lipschitz.max()) <= 0.8
    assert cover.contains(cover.center)
    assert cover.choices(cover.center)


@pytest.mark.slow
@pytest.mark.parametrize("which", [0, 1], ids=["mu", "chi"])
def test_catalog_source_refines_seed_values(catalog_source, which):
    t = _seed_values()[which]
    blocks, index = catalog_source.approximate(t, 1e-9)
    assert blocks is not None
    value = catalog_source._exact_value(blocks, index)
    assert abs(value.to_complex() - t) <= 1e-9
    assert ratio(catalog_source._tree(blocks, index), LAMBDA0) == value


@pytest.mark.slow
def test_refined_words_follow_the_seed(catalog_source):
    t = _seed_values()[0]
    words = []
    for _ in range(2):
        source = CatalogPairSource({"seed": 3})
        source.prepare(LAMBDA0, 3, catalog_source.catalog)
        words.append(source.approximate(t, 1e-9))
    assert words[0] == words[1]


# --- Tree-backed implementers ---
def _random_target(rng):
    return GaussianRational(Fraction(rng.randint(-5000, 5000), 1000), Fraction(rng.randint(-5000, 5000), 1000))


@pytest.mark.slow
def test_tree_implementer_is_certified(tree_implementer):
    assert tree_implementer.certified
    assert tree_implementer.has_trees
    assert all(p.tree_g is not None and ratio(p.tree_g, LAMBDA0) == p.mu for p in tree_implementer.pairs[:20])
    data = tree_implementer.to_json()
    restored = FastImplementer.from_json(data)
    assert restored.certified
    assert restored.has_trees
    assert Certificate.from_json(data["certificate"]) == tree_implementer.certificate


@pytest.mark.slow
def test_emitted_trees_hit_random_targets(tree_implementer, rng):
    eps = Fraction(1, 10**6)
    for n in range(100):
        p = _random_target(rng)
        plan = run_fast_implementation(tree_implementer, p, eps)
        tree, pair = emit_tree(plan, tree_implementer)
        assert (pair.z_in / pair.z_out - p).norm() < eps * eps
        if n < 3:
            assert tree_partition(tree, LAMBDA0) == pair


@pytest.mark.slow
def test_tree_plan_length_is_logarithmic(tree_implementer, rng):
    targets = [_random_target(rng) for _ in range(10)]
    xs, ys = [], []
    for k in range(2, 9):
        eps = Fraction(1, 10**k)
        xs.append(k * math.log(10))
        ys.append(np.mean([len(run_fast_implementation(tree_implementer, p, eps)) for p in targets]))
    xs, ys = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    r_squared = 1 - float(residual @ residual) / float(((ys - ys.mean()) ** 2).sum())
    assert slope > 0
    assert r_squared > 0.95


@pytest.mark.slow
def test_tree_implementer_below_fixed_point_rounding(tree_implementer):
    eps = Fraction(1, 2**140)
    p = GaussianRational(2, -1)
    plan = run_fast_implementation(tree_implementer, p, eps)
    assert (replay_plan(plan) - p).norm() < eps * eps
