import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import E, paper_log_mass
from shiftlike import (
    DensityLineSystem,
    DensityPiece,
    ExtensionRule,
    MeasureProfile,
    NonIntegrableDensity,
    OutOfRange,
    ZeroDensity,
    distortion_scan,
    profile_from_density,
    profile_mass,
)
from shiftlike.system_model import BoundedVerdict, DistortionRecord, _bounded_verdict


def test_paper_window_masses(paper_system):
    prof = profile_from_density(paper_system, (-3, 5))
    assert math.exp(profile_mass(prof, 5)) == pytest.approx(math.exp(5) * (E - 1), rel=1e-14)
    assert math.exp(profile_mass(prof, -3)) == pytest.approx(0.5 * math.exp(-6) * (E**2 - 1), rel=1e-14)
    assert profile_mass(prof, 0) == pytest.approx(math.log(E - 1), abs=1e-15)
    assert prof.extension is ExtensionRule.REJECT


@pytest.mark.parametrize("k", [-7, 0, 3, 40])
def test_uniform_density_has_unit_windows(k):
    assert DensityLineSystem.uniform().log_cell_mass(k) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n", list(range(-60, 61)))
def test_closed_form_matches_in_log_domain(paper_system, n):
    assert abs(paper_system.log_cell_mass(n) - paper_log_mass(n)) < 1e-10


@pytest.mark.parametrize("k", [-12, -3, -1, 0, 1, 2, 9])
def test_quadrature_cross_check(paper_system, k):
    # Independent route: adaptive quadrature of the density itself.
    quad = paper_system.quadrature_mass(k, k + 1)
    assert math.exp(paper_system.log_cell_mass(k)) == pytest.approx(quad, rel=1e-10)


@given(st.integers(-30, 30), st.floats(0.05, 0.95))
@settings(max_examples=60, deadline=None)
def test_window_additivity(k, split):
    system = DensityLineSystem.paper_example()
    left = math.exp(system.log_integral(k, k + split))
    right = math.exp(system.log_integral(k + split, k + 1))
    whole = math.exp(system.log_cell_mass(k))
    assert left + right == pytest.approx(whole, rel=1e-12)


def test_zero_window_is_rejected():
    system = DensityLineSystem((DensityPiece(-10.0, 1.0, 1.0, 0.0),))
    with pytest.raises(NonIntegrableDensity):
        system.profile((0, 3))


def test_density_must_have_mass_on_w():
    with pytest.raises(NonIntegrableDensity):
        DensityLineSystem((DensityPiece(2.0, 5.0, 1.0, 0.0),))


def test_equal_measure_subcells(paper_system):
    edges = paper_system.subcell_edges(3)
    masses = [math.exp(paper_system.log_subcell_mass(0, j, 3)) for j in range(8)]
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert np.allclose(masses, (E - 1) / 8, rtol=1e-12)
    # on W the density is e^x, so the split points are log(1 + j (e - 1) / 8)
    assert np.allclose(edges, np.log1p(np.arange(9) * (E - 1) / 8), atol=1e-13)


class TestProfileMass:
    def test_lookup(self):
        prof = MeasureProfile.from_mapping({-1: 0.5, 0: 1.0, 1: 2.5})
        assert profile_mass(prof, 1) == 2.5

    def test_reject_outside(self):
        prof = MeasureProfile.from_mapping({0: 1.0, 1: 2.5})
        with pytest.raises(OutOfRange):
            profile_mass(prof, 2)

    def test_geometric_tail(self):
        values = {k: -float(k) for k in range(0, 11)}
        prof = MeasureProfile.from_mapping(values, ExtensionRule.GEOMETRIC)
        assert profile_mass(prof, 12) == values[10] - 2

    def test_geometric_head(self):
        prof = MeasureProfile.from_mapping({-1: 3.0, 0: 1.0}, ExtensionRule.GEOMETRIC)
        assert profile_mass(prof, -3) == pytest.approx(7.0)

    def test_invariants(self):
        with pytest.raises(ValueError):
            MeasureProfile.from_mapping({1: 0.0, 2: 0.0})
        with pytest.raises(ValueError):
            MeasureProfile.from_mapping({0: math.inf})
        with pytest.raises(ValueError):
            MeasureProfile.from_mapping({0: 0.0, 2: 0.0})

    def test_homogeneous_subcells(self):
        prof = MeasureProfile.from_mapping({0: 1.0, 1: 3.0})
        assert prof.log_subcell_mass(1, 5, 3) == pytest.approx(3.0 - 3 * math.log(2))


class TestDistortion:
    def test_paper_ratios(self, paper_system):
        report = distortion_scan(paper_system, (-40, 40))
        assert report.ratio(3) == pytest.approx(1.0, abs=1e-12)
        assert report.ratio(-2) == pytest.approx(E, abs=1e-12)
        assert report.bound_estimate == pytest.approx(E, abs=1e-12)
        assert report.bounded_verdict is BoundedVerdict.BOUNDED_AT_HORIZON

    def test_extrema_are_the_closed_forms(self, paper_system):
        # rho_k(x) = e^k for k >= 0 and e^(x + 2k) for k <= -1
        report = distortion_scan(paper_system, (-4, 4))
        for rec in report.records:
            if rec.k >= 0:
                assert rec.log_rho_inf == pytest.approx(rec.k, abs=1e-12)
                assert rec.log_rho_sup == pytest.approx(rec.k, abs=1e-12)
            else:
                assert rec.log_rho_inf == pytest.approx(2 * rec.k, abs=1e-12)
                assert rec.log_rho_sup == pytest.approx(2 * rec.k + 1, abs=1e-12)

    def test_constant_density(self):
        report = distortion_scan(DensityLineSystem.uniform(), (-5, 5))
        assert all(rec.ratio == 1.0 for rec in report.records)

    def test_grid_fallback_underestimates(self, paper_system):
        exact = distortion_scan(paper_system, (-3, 3))
        grid = distortion_scan(paper_system, (-3, 3), sample_grid_size=2000, exact=False)
        for a, b in zip(exact.records, grid.records):
            assert 1.0 <= b.ratio <= a.ratio + 1e-12
            assert b.ratio == pytest.approx(a.ratio, rel=1e-3)

    def test_ratio_at_least_one(self):
        system = DensityLineSystem((
            DensityPiece(-math.inf, -2.0, 3.0, 0.5),
            DensityPiece(-2.0, 1.5, 0.2, -1.0),
            DensityPiece(1.5, math.inf, 4.0, -0.3),
        ))
        report = distortion_scan(system, (-6, 6))
        assert all(rec.ratio >= 1.0 for rec in report.records)
        assert report.bound_estimate == max(rec.ratio for rec in report.records)

    def test_kink_inside_window(self):
        # exponent flips from -3 to +3 at x = 0.5, so every k != 0 sees ratio e^3
        system = DensityLineSystem((
            DensityPiece(-math.inf, 0.5, 1.0, -3.0),
            DensityPiece(0.5, math.inf, math.exp(-3.0), 3.0),
        ))
        report = distortion_scan(system, (-10, 10))
        assert report.ratio(0) == pytest.approx(1.0, abs=1e-12)
        for k in (-10, -1, 1, 5, 10):
            assert report.ratio(k) == pytest.approx(math.exp(3.0), rel=1e-12)
        assert report.bounded_verdict is BoundedVerdict.BOUNDED_AT_HORIZON

    @pytest.mark.parametrize("growth, expected", [
        (lambda k: float(abs(k)), BoundedVerdict.UNBOUNDED_TREND),
        (lambda k: 0.0, BoundedVerdict.BOUNDED_AT_HORIZON),
        (lambda k: 0.005 * (abs(k) > 4), BoundedVerdict.INCONCLUSIVE),
    ])
    def test_verdict_heuristic(self, growth, expected):
        records = [DistortionRecord(k, 0.0, growth(k)) for k in range(-8, 9)]
        assert _bounded_verdict(records) is expected

    def test_zero_density(self):
        system = DensityLineSystem((DensityPiece(-1.0, 2.0, 1.0, 0.0),))
        with pytest.raises(ZeroDensity):
            distortion_scan(system, (0, 3))
