import math

import numpy as np
import pytest
from scipy.special import erf

from entropower.errors import OutOfRange
from entropower.grid import Grid1D, SampledDensity
from entropower.infoscan import (
    decreasing_rearrangement,
    equimeasurable,
    find_peaks,
    information_scan,
    laplace_consistency,
    onset_point,
    symmetric_rearrangement,
)
from entropower.renyi import shannon_entropy
from entropower.states import (
    exponential_density,
    gaussian_density,
    gaussian_mixture_density,
    laplace_density,
    uniform_density,
)

LOG2E = math.log2(math.e)


def gaussian_bin_masses(scan):
    # P(i - a <= u) = erf(sqrt(u / log2 e)) for a Gaussian of any width
    u = np.clip(scan.edges - scan.onset, 0, None)
    cdf = erf(np.sqrt(u / LOG2E))
    return np.diff(cdf)


class TestOnset:
    def test_gaussian(self, gauss):
        assert onset_point(gauss) == pytest.approx(0.5 * math.log2(2 * math.pi), abs=1e-12)

    def test_uniform(self):
        assert onset_point(uniform_density(4.0)) == pytest.approx(2.0, abs=1e-12)

    def test_cauchy(self, cauchy_density):
        # renormalizing the truncated grid lifts the peak by ~1e-5 relative
        assert onset_point(cauchy_density) == pytest.approx(math.log2(math.pi), abs=1e-4)


class TestScanShape:
    def test_invariants(self, gauss_scan, cauchy_scan):
        for scan in (gauss_scan, cauchy_scan):
            assert np.all(np.diff(scan.f) >= 0)
            assert scan.f[-1] >= 1 - 1e-6
            assert np.all(scan.g >= 0)
            assert scan.mass() == pytest.approx(1.0, abs=1e-6)
            assert scan.x[0] - 0.5 * scan.bin_width == pytest.approx(scan.onset)

    def test_default_window(self, gauss_scan):
        assert gauss_scan.g.size == 1024
        assert gauss_scan.edges[-1] - gauss_scan.edges[0] == pytest.approx(40.0)

    def test_overflow_is_folded_into_last_bin(self, gauss):
        scan = information_scan(gauss, span=10.0)
        tail = math.erfc(math.sqrt(10.0 / LOG2E))
        assert scan.overflow_mass == pytest.approx(tail, rel=1e-3)
        assert scan.mass() == pytest.approx(1.0, abs=1e-9)

    def test_cauchy_grid_ends_inside_window(self, cauchy_scan):
        assert cauchy_scan.overflow_mass == 0.0

    def test_uniform_is_a_point_mass(self):
        scan = information_scan(uniform_density(4.0))
        k = int(np.argmax(scan.g))
        assert scan.g[k] * scan.bin_width == pytest.approx(1.0, abs=1e-12)
        assert abs(scan.x[k] - 2.0) <= scan.bin_width
        assert scan.f[0] == pytest.approx(1.0)

    def test_gaussian_against_shifted_gamma(self, gauss_scan):
        exact = gaussian_bin_masses(gauss_scan)
        assert np.abs(gauss_scan.g * gauss_scan.bin_width - exact).sum() <= 1e-3

    def test_gaussian_against_pointwise_shifted_gamma(self, gauss_scan):
        # the pointwise closed form away from the 1/sqrt onset singularity
        x = gauss_scan.x
        z = 2 * x / LOG2E - math.log(2 * math.pi)
        sel = z > 0.5
        g = (2 / LOG2E) * np.exp(-z[sel] / 2) / np.sqrt(2 * math.pi * z[sel])
        assert np.abs(gauss_scan.g[sel] - g).sum() * gauss_scan.bin_width <= 0.01

    def test_cdf_matches_erf(self, gauss_scan):
        u = np.clip(gauss_scan.x - gauss_scan.onset, 0, None)
        np.testing.assert_allclose(gauss_scan.f, erf(np.sqrt(u / LOG2E)), atol=2e-4)

    def test_exponential_information_is_exponential(self):
        # g(x) = ln2 * 2^-(x - a) for any rate
        scan = information_scan(exponential_density(3.0))
        exact = np.diff(1 - np.exp2(-(scan.edges - scan.onset)))
        assert np.abs(scan.g[:-1] * scan.bin_width - exact[:-1]).sum() < 1e-3

    def test_width_invariance(self):
        a = information_scan(gaussian_density(0.3))
        b = information_scan(gaussian_density(3.0))
        np.testing.assert_allclose(a.g, b.g, atol=1e-9)
        assert b.onset - a.onset == pytest.approx(math.log2(10.0))

    def test_too_few_bins(self, gauss):
        with pytest.raises(OutOfRange):
            information_scan(gauss, bins=32)

    def test_csv(self, gauss_scan):
        lines = gauss_scan.to_csv().splitlines()
        assert lines[0] == "x_bits,f,g"
        assert len(lines) == 1025

    def test_zero_samples_are_skipped(self):
        grid = Grid1D(-2.0, 4.0 / 1024, 1025)
        vals = np.where(np.abs(grid.x) < 1.0, 0.5, 0.0)
        scan = information_scan(SampledDensity(grid, vals))
        assert scan.dropped_mass == 0.0
        assert scan.mass() == pytest.approx(1.0, abs=1e-12)


class TestMoments:
    def test_first_moment_is_shannon(self, gauss, gauss_scan, cauchy_density, cauchy_scan):
        assert gauss_scan.raw_moment(1) == pytest.approx(shannon_entropy(gauss), abs=1e-3)
        assert cauchy_scan.raw_moment(1) == pytest.approx(math.log2(4 * math.pi), abs=1e-3)

    def test_moment_about_point(self, gauss_scan):
        m1 = gauss_scan.raw_moment(1)
        assert gauss_scan.raw_moment(1, about=m1) == pytest.approx(0.0, abs=1e-12)
        assert gauss_scan.raw_moment(2, about=m1) == pytest.approx(0.5 * LOG2E**2, rel=1e-3)


class TestLaplaceConsistency:
    @pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.0])
    def test_gaussian(self, gauss, gauss_scan, p):
        chk = laplace_consistency(gauss, p, gauss_scan)
        assert chk.relative_error <= 1e-3

    def test_gaussian_closed_form(self, gauss, gauss_scan):
        chk = laplace_consistency(gauss, 2.0, gauss_scan)
        assert chk.rhs == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-10)
        assert chk.lhs == pytest.approx(chk.rhs, rel=1e-3)

    def test_cauchy_closed_form(self, cauchy_density, cauchy_scan):
        chk = laplace_consistency(cauchy_density, 2.0, cauchy_scan)
        assert chk.rhs == pytest.approx(1 / (2 * math.pi), rel=1e-4)
        assert chk.lhs == pytest.approx(chk.rhs, rel=1e-3)

    def test_unit_index(self, cauchy_density, cauchy_scan):
        chk = laplace_consistency(cauchy_density, 1.0, cauchy_scan)
        assert chk.lhs == pytest.approx(1.0, abs=1e-9)
        assert chk.rhs == pytest.approx(1.0, abs=1e-4)

    def test_binned_view_is_coarser(self, gauss, gauss_scan):
        cells = laplace_consistency(gauss, 2.0, gauss_scan).relative_error
        bins = laplace_consistency(gauss, 2.0, gauss_scan, resolution="bins").relative_error
        assert cells < bins < 5e-3

    @pytest.mark.parametrize("p", [0.0, 2.5])
    def test_range(self, gauss, p):
        with pytest.raises(OutOfRange):
            laplace_consistency(gauss, p)


class TestRearrangement:
    def test_shift(self, gauss):
        v = np.roll(gauss.values, 5)
        assert equimeasurable(gauss, SampledDensity(gauss.grid, v))

    def test_mirror(self):
        F = gaussian_mixture_density([0.3, 0.7], [-2, 1], [0.5, 1.0])
        assert equimeasurable(F, SampledDensity(F.grid, F.values[::-1].copy()))

    def test_widths_differ(self):
        assert not equimeasurable(gaussian_density(1.0), gaussian_density(2.0), tol=1e-3)

    def test_laplace_and_exponential(self):
        # same spacing, different sampling of the level sets: O(lam dx) apart
        assert equimeasurable(laplace_density(2.0), exponential_density(1.0), tol=2e-3)

    def test_level_function(self, gauss):
        m, lv = decreasing_rearrangement(gauss)
        assert np.all(np.diff(lv) <= 0)
        assert m[-1] == pytest.approx(1.0, abs=1e-3)

    def test_symmetric_rearrangement_is_equimeasurable(self):
        F = gaussian_mixture_density([0.3, 0.7], [-3, 1], [0.4, 0.9])
        S = symmetric_rearrangement(F)
        assert equimeasurable(F, S, tol=1e-12)
        assert int(np.argmax(S.values)) == F.grid.n // 2

    def test_scan_invariance(self):
        F = gaussian_mixture_density([0.3, 0.7], [-3, 1], [0.4, 0.9])
        a = information_scan(F)
        b = information_scan(symmetric_rearrangement(F))
        # the interpolation midpoints differ near the peak; f absorbs that
        assert np.abs(a.g - b.g).sum() * a.bin_width < 5e-3
        assert np.abs(a.f - b.f).max() < 5e-4


class TestPeaks:
    def test_two_level_mixture(self):
        F = gaussian_mixture_density([0.7, 0.3], [-4.0, 4.0], [1.0, 1.0])
        scan = information_scan(F)
        peaks = find_peaks(scan)
        between = (F.x > -4) & (F.x < 4)
        # every stationary point of F shows up, the valley included
        heights = [F.values[F.x < 0].max(), F.values[F.x > 0].max(), F.values[between].min()]
        expected = sorted(-math.log2(h) for h in heights)
        assert len(peaks) == 3
        for got, want in zip(peaks, expected):
            assert abs(got - want) <= scan.bin_width

    def test_single_gaussian(self, gauss_scan):
        peaks = find_peaks(gauss_scan)
        assert len(peaks) == 1
        assert abs(peaks[0] - gauss_scan.onset) <= gauss_scan.bin_width
