import json
import math

import numpy as np
import pytest

from infconv.errors import HypothesisViolated, OutsideSupremumDomain
from infconv.gls import ConstantOne, Power, PSampling
from infconv.grid import (
    Gaussian,
    IndicatorOrigin,
    Quadratic,
    Tent,
    TruncatedQuadratic,
    make_grid,
    sample,
)
from infconv.harness import (
    DEFAULT_SEED,
    empirical_K,
    instantiate,
    lebesgue_bound,
    quadrature_constant,
    random_catalog_specs,
    scan_ratio,
    tolerance_model,
    verify_theorem_2_1,
    verify_theorem_4_1,
)
from infconv.io import dumps_json
from infconv.norms import lp_norm


def test_lebesgue_bound():
    assert lebesgue_bound(1, 3, 2) == 3 ** 0.5
    assert lebesgue_bound(2, 2, 1) == 4.0
    assert lebesgue_bound(1, 1, 4) == 1.0


def test_quadrature_constant_and_tolerance(line):
    cq = quadrature_constant()
    assert 0 < cq < 1
    # the reference error it was calibrated on
    g17 = make_grid(1, 6, 17)
    err = abs(lp_norm(sample(Gaussian(), g17), 2) / (math.pi / 2) ** 0.25 - 1)
    assert cq == pytest.approx(err * 17**2, rel=1e-12)
    tol = tolerance_model(line, [sample(Gaussian(), line)], 2)
    assert tol == pytest.approx(max(1e-10, cq / 1025**2), rel=1e-6)
    # mass on the boundary layer raises the tolerance
    assert tolerance_model(line, [sample(Quadratic(1), line)], 2) > tol


@pytest.mark.parametrize("spec", [Gaussian(), Tent(2.0), Quadratic(1.0), TruncatedQuadratic(1.0, 7.0)], ids=str)
def test_single_function(spec, line):
    rep = empirical_K([spec], 2, line)
    assert rep.ratio == 1.0
    assert rep.bound == 1.0
    assert rep.rel_gap == 0.0
    assert rep.surrogate_ratio == pytest.approx(1.0, rel=1e-15)
    assert rep.upper_bound_ok


def test_gaussian_pair_report(line):
    rep = verify_theorem_2_1(1, 2, 2, Gaussian(), line)
    assert rep.ratio < 0.1
    assert rep.bound == math.sqrt(2)
    assert abs(rep.surrogate_ratio - math.sqrt(2)) <= 0.002
    assert rep.upper_bound_ok and rep.satisfied
    assert rep.hilbert
    assert rep.extremal_gap == pytest.approx(rep.surrogate_ratio - rep.ratio)
    assert any(n.startswith("extremal audit") and "not convex" in n for n in rep.notes)


def test_quadratic_pair_ratio(line):
    # g = x^2/2 up to O(h^2), so ||g|| / (2 ||x^2||) = 1/4
    rep = verify_theorem_2_1(1, 2, 2, Quadratic(1.0), line)
    assert rep.ratio == pytest.approx(0.25, rel=1e-4)
    assert rep.surrogate_ratio == pytest.approx(math.sqrt(2), rel=1e-12)
    assert rep.satisfied
    # convex, so the audit blames the box truncation rather than the split
    audit = [n for n in rep.notes if n.startswith("extremal audit")]
    assert len(audit) == 1 and "is convex" in audit[0]


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("p", [1, 1.5, 4])
def test_surrogate_ratio_reaches_constant(m, p, line):
    rep = verify_theorem_2_1(1, m, p, Gaussian(), line)
    assert rep.surrogate_ratio == pytest.approx(m ** (1 / p), rel=1e-3)


def test_surrogate_heterogeneous(line):
    rep = empirical_K([Gaussian(), Tent(3.0)], 2, line)
    assert rep.surrogate_ratio > 0
    assert rep.ratio <= rep.bound * (1 + rep.tolerance)


def test_outside_supremum_domain(line):
    with pytest.raises(OutsideSupremumDomain):
        empirical_K([TruncatedQuadratic(1.0, 3.0)] * 2, 2, line)  # +inf outside |x| <= 3
    with pytest.raises(OutsideSupremumDomain):
        empirical_K([Quadratic(0.0)] * 2, 2, line)
    with pytest.raises(OutsideSupremumDomain):
        empirical_K([IndicatorOrigin()] * 2, 2, line)
    with pytest.raises(OutsideSupremumDomain):
        empirical_K([Gaussian()] * 2, math.inf, line)
    with pytest.raises(OutsideSupremumDomain):
        empirical_K([], 2, line)


def test_dimension_mismatch(line):
    with pytest.raises(ValueError):
        verify_theorem_2_1(2, 2, 2, Gaussian(), line)


def test_separable_engine_matches_brute():
    grid = make_grid(2, 3, 17)
    a = empirical_K([Quadratic(1.0)] * 2, 2, grid, engine="brute")
    b = empirical_K([Quadratic(1.0)] * 2, 2, grid, engine="separable")
    assert a.ratio == pytest.approx(b.ratio, rel=1e-12)
    assert a.bound == 2.0


def test_random_catalog_upper_bound():
    rng = np.random.default_rng(DEFAULT_SEED)
    grid = make_grid(1, 6, 129)
    for _ in range(20):
        m = int(rng.integers(2, 4))
        specs = random_catalog_specs(rng, m, grid)
        for f in specs:
            assert 0 < lp_norm(sample(f, grid), 2) < math.inf
        rep = empirical_K(specs, float(rng.choice([1, 2, 4])), grid)
        assert rep.upper_bound_ok


def test_report_serialises(line):
    rep = verify_theorem_2_1(1, 2, 2, Gaussian(), make_grid(1, 6, 65))
    data = json.loads(dumps_json(rep.to_dict()))
    assert data["m"] == 2 and data["grid"]["n"] == 65


# GLS bound -------------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3])
def test_theorem_4_1_trivial(m):
    grid = make_grid(1, 6, 257)
    rep = verify_theorem_4_1([Gaussian()] * m, Power(2), grid, PSampling(1, 64, 17))
    assert rep.fund == m
    assert rep.satisfied and rep.margin > 0
    assert rep.chain and rep.chain_ok
    assert rep.example_bound == pytest.approx(m * rep.sum_component_norms)
    assert rep.example_ok
    assert rep.zeta == str(ConstantOne(1, math.inf))


def test_theorem_4_1_given_factorisation():
    grid = make_grid(1, 6, 129)
    rep = verify_theorem_4_1([Gaussian(), Tent(2.0)], Power(2), grid, PSampling(1, 32, 9), strategy="given",
                             nu=Power(1), zeta=Power(2))
    # phi(2) for Power(2) sits at p = 1 because delta >= 1
    assert rep.fund == pytest.approx(2.0, rel=1e-12)
    assert rep.satisfied and rep.chain_ok
    assert rep.example_bound is None


def test_theorem_4_1_hypothesis_violated():
    grid = make_grid(1, 6, 65)
    with pytest.raises(HypothesisViolated):
        verify_theorem_4_1([IndicatorOrigin(), Gaussian()], Power(2), grid, PSampling(1, 8, 5))
    with pytest.raises(HypothesisViolated):
        verify_theorem_4_1([], Power(2), grid)


# scans -----------------------------------------------------------------------

def test_instantiate():
    assert instantiate("trunc-quadratic:R=7", "c", 2.0) == TruncatedQuadratic(2.0, 7.0)
    assert instantiate("quadratic", "c", 0.5) == Quadratic(0.5)


def test_scan_truncated_quadratic(line):
    res = scan_ratio("trunc-quadratic:R=7", "c", [0.25, 1, 4], 1, 2, 2, line)
    assert [e.param for e in res.entries] == [0.25, 1.0, 4.0]
    for e in res.entries:
        assert e.report.ratio <= math.sqrt(2) * (1 + e.report.tolerance)
    assert res.best_ratio == max(e.report.ratio for e in res.entries)
    assert "not claimed" in res.note


def test_scan_records_errors(line):
    res = scan_ratio("quadratic", "c", [0.0, 1.0], 1, 2, 2, line)
    assert res.entries[0].report is None
    assert res.entries[0].error.startswith("OutsideSupremumDomain")
    assert res.best_param == 1.0
    none = scan_ratio("quadratic", "c", [0.0], 1, 2, 2, line)
    assert none.best_ratio is None


@pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
def test_degenerate_psi_matches_lebesgue_report(r, line):
    from infconv.gls import Degenerate
    gls = verify_theorem_4_1([Gaussian(), Tent(2.0)], Degenerate(r), line)
    leb = empirical_K([Gaussian(), Tent(2.0)], r, line)
    assert gls.lhs == pytest.approx(leb.lhs, rel=1e-10)
    assert gls.sum_component_norms == pytest.approx(leb.rhs_sum, rel=1e-10)
    assert gls.fund == pytest.approx(leb.bound, rel=1e-10)
    assert gls.p_star == r


def test_theorem_4_1_single_function(line):
    rep = verify_theorem_4_1([Tent(2.0)], Power(2), line, PSampling(1, 64, 9))
    assert rep.fund == 1.0
    assert rep.lhs == pytest.approx(rep.sum_component_norms, rel=1e-15)
    assert rep.satisfied


def test_truncated_quadratic_pair_positive(line):
    rep = empirical_K([TruncatedQuadratic(1.0, 7.0)] * 2, 2, line)
    assert 0 < rep.ratio <= math.sqrt(2) * (1 + rep.tolerance)
    # coarse-grid cross-check of the fold against the direct tuple oracle
    from infconv.engine import infconv_direct, infconv_fold
    coarse = make_grid(1, 6, 17)
    fs = [sample(TruncatedQuadratic(1.0, 7.0), coarse)] * 2
    np.testing.assert_array_equal(infconv_fold(fs).values, infconv_direct(fs).values)


@pytest.mark.slow
def test_gaussian_plane_surrogate_brute():
    rep = verify_theorem_2_1(2, 2, 1, Gaussian(), make_grid(2, 6, 257), surrogate_tol=1e-2)
    assert rep.surrogate_ratio == pytest.approx(4.0, rel=1e-2)
    assert rep.upper_bound_ok
