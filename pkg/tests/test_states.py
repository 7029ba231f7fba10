import math

import numpy as np
import pytest
from scipy.special import sici

from entropower.errors import OutOfRange, SpliceFailure, ValidationError
from entropower.grid import density_from_amplitude, integrate, integrate_values, lp_norm
from entropower.repur import second_moment
from entropower.states import (
    PowerLawTail,
    StretchedTail,
    cauchy_pltwp,
    gaussian_mixture_density,
    gaussian_mixture_state,
    gaussian_state,
    squeezed_superposition,
    squeezed_variances,
    synthetic_tail_density,
)
from entropower.transform import fourier_conjugate


class TestGaussianState:
    def test_normalized_and_width(self):
        psi = gaussian_state(1.7, center=-2.0, hbar=0.5)
        F = density_from_amplitude(psi)
        mean, var = second_moment(F)
        assert integrate(F) == pytest.approx(1.0, abs=1e-12)
        assert mean == pytest.approx(-2.0, abs=1e-12)
        assert var == pytest.approx(1.7**2, rel=1e-10)

    def test_grid_is_power_of_two(self):
        n = gaussian_state(0.01).grid.n
        assert n & (n - 1) == 0


class TestGaussianExamples:
    def test_momentum_variance(self):
        psi = gaussian_state(1.0)
        _, vp = second_moment(density_from_amplitude(fourier_conjugate(psi)))
        assert vp == pytest.approx(0.25, abs=1e-6)

    def test_power(self):
        from entropower.renyi import entropy_power

        assert entropy_power(density_from_amplitude(gaussian_state(2.0)), 1) == pytest.approx(4.0, abs=1e-5)


class TestSqueezed:
    @pytest.mark.parametrize("zeta", [0.0, 1.0, 4.0, -4.0])
    def test_densities_normalized(self, zeta):
        st = squeezed_superposition(zeta)
        assert integrate(density_from_amplitude(st.psi)) == pytest.approx(1.0, abs=1e-8)
        assert integrate(density_from_amplitude(st.psihat)) == pytest.approx(1.0, abs=1e-8)

    def test_peak_grows_with_squeezing(self):
        peaks = [np.max(np.abs(squeezed_superposition(z).psi.psi)) for z in (0.0, 1.0, 2.0, 3.0)]
        assert all(b > a for a, b in zip(peaks, peaks[1:]))

    def test_vacuum_saturates_all_rows(self):
        from entropower.repur import repur_sweep

        st = squeezed_superposition(0.0)
        table = repur_sweep(st.psi, [-0.5, -0.2, 0.0, 1.0, 30.0, math.inf], psihat=st.psihat)
        assert all(row.saturated for row in table.rows)

    @pytest.mark.parametrize("zeta", [-1.5, 0.0, 1.0, 3.0])
    def test_fft_matches_analytic_momentum(self, zeta):
        st = squeezed_superposition(zeta)
        np.testing.assert_allclose(fourier_conjugate(st.psi, st.hbar).psi, st.psihat.psi, atol=1e-9)

    @pytest.mark.parametrize("zeta", [0.0, 0.5, 2.0, 4.0])
    @pytest.mark.parametrize("omega,hbar", [(1.0, 1.0), (2.5, 0.3)])
    def test_variances(self, zeta, omega, hbar):
        st = squeezed_superposition(zeta, omega, hbar)
        _, vx = second_moment(density_from_amplitude(st.psi))
        _, vp = second_moment(density_from_amplitude(st.psihat))
        assert vx == pytest.approx(st.var_x, rel=1e-9)
        assert vp == pytest.approx(st.var_p, rel=1e-9)

    def test_vacuum_limit(self):
        assert squeezed_variances(0.0, 2.0, 0.5) == pytest.approx((0.125, 0.5))

    def test_limit(self):
        with pytest.raises(OutOfRange):
            squeezed_superposition(4.5)


class TestCauchy:
    def test_density_is_cauchy(self, cauchy):
        x = cauchy.psi.x
        np.testing.assert_allclose(np.abs(cauchy.psi.psi) ** 2, 1 / (math.pi * (1 + x**2)), rtol=1e-4)

    @staticmethod
    def central_mass_cut(amp, fraction=0.9):
        d = np.abs(amp.psi) ** 2
        order = np.argsort(np.abs(amp.x))
        k = np.searchsorted(np.cumsum(d[order]) * amp.grid.dx, fraction)
        return abs(amp.x[order][k])

    def test_fft_matches_truncated_transform_on_central_mass(self, cauchy, cauchy_momentum):
        # cutting the 1/|x| tail at +-L adds sqrt(2)/pi Ci(|p| L); at p=0 the cut integral is sqrt(2)/pi asinh(L)
        p = cauchy_momentum.x
        half = -cauchy.psi.grid.x0
        oracle = cauchy.psihat_analytic.re.copy()
        nz = p != 0
        oracle[nz] += math.sqrt(2) / math.pi * sici(np.abs(p[nz]) * half)[1]
        oracle[~nz] = math.sqrt(2) / math.pi * math.asinh(half)
        sel = np.abs(p) <= self.central_mass_cut(cauchy.psihat_analytic)
        rel = np.abs(cauchy_momentum.psi[sel] - oracle[sel]) / np.abs(oracle[sel])
        assert rel.max() < 1e-3

    def test_fft_matches_k0_away_from_origin(self, cauchy, cauchy_momentum):
        # only the nodes |p| <= 3 dp feel the cut above 1e-3 (it decays like k^-2)
        p = cauchy_momentum.x
        sel = (np.abs(p) > 3.5 * cauchy_momentum.grid.dx) & (np.abs(p) <= self.central_mass_cut(cauchy.psihat_analytic))
        rel = np.abs(cauchy_momentum.psi[sel] - cauchy.psihat_analytic.psi[sel]) / np.abs(cauchy.psihat_analytic.psi[sel])
        assert rel.max() < 1e-3

    def test_mode(self, cauchy):
        assert np.max(np.abs(cauchy.psi.psi) ** 2) == pytest.approx(1 / math.pi, rel=1e-4)

    def test_momentum_l1_norm(self, cauchy):
        # int K0 over the half line is pi/2, so int |psihat| = sqrt(2 hbar / gamma)
        # the cell-averaged p=0 node and the cut at the grid edge cost ~3e-6
        assert lp_norm(cauchy.psihat_analytic, 1) == pytest.approx(math.sqrt(2.0), rel=1e-5)

    def test_momentum_density_against_quadrature(self, cauchy):
        # int K0^2 over the half line is pi^2/4: unit mass
        assert lp_norm(cauchy.psihat_analytic, 2) == pytest.approx(1.0, abs=2e-4)

    def test_grids_scale_and_shift(self):
        a = cauchy_pltwp(1.0, 0.0, n=2**12, span_exponent=8)
        b = cauchy_pltwp(2.0, 1.0, n=2**12, span_exponent=8)
        assert b.psi.grid.dx == pytest.approx(2 * a.psi.grid.dx, rel=1e-14)
        assert b.psi.x[2**11] == pytest.approx(1.0)
        np.testing.assert_allclose(np.abs(b.psi.psi) * math.sqrt(2.0), np.abs(a.psi.psi), rtol=1e-12)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            cauchy_pltwp(0.0)


class TestMixture:
    def test_density_is_mixture(self):
        psi = gaussian_mixture_state([0.3, 0.7], [-2, 2], [0.5, 1.0])
        F = density_from_amplitude(psi)
        G = gaussian_mixture_density([0.3, 0.7], [-2, 2], [0.5, 1.0], grid=psi.grid)
        np.testing.assert_allclose(F.values, G.values, rtol=1e-10, atol=1e-300)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            gaussian_mixture_state([0.5, -0.5], [0, 1], [1, 1])


class TestSynthetic:
    @pytest.mark.parametrize("model", [PowerLawTail(1.0), PowerLawTail(0.5, 0.2), StretchedTail(1.0, 1.0), StretchedTail(2.0, 0.5)])
    def test_tail_and_splice(self, model):
        F = synthetic_tail_density(model)
        y = np.abs(F.x)
        vals = F.values
        far = y > 4.0
        ratio = vals[far] / model(y[far])
        # normalization rescales the model by a single constant
        assert ratio.max() / ratio.min() == pytest.approx(1.0, rel=1e-12)
        k = int(np.argmin(np.abs(F.x - 3.0)))
        assert abs(vals[k + 1] - vals[k]) < 0.05 * vals[k]
        assert integrate(F) == pytest.approx(1.0, abs=1e-12)

    def test_shallow_power_law_keeps_core_resolution(self):
        F = synthetic_tail_density(PowerLawTail(0.3))
        assert F.grid.dx <= 3.0 / 30 + 1e-15
        assert math.log2(F.values.max() / F.values[0]) > 15

    def test_gaussian_tail_gives_the_gaussian(self):
        model = StretchedTail(2.0, math.log2(math.e) / 2, 1 / math.sqrt(2 * math.pi))
        F = synthetic_tail_density(model)
        exact = np.exp(-0.5 * F.x**2) / math.sqrt(2 * math.pi)
        np.testing.assert_allclose(F.values, exact, rtol=1e-9, atol=1e-300)

    def test_round_trips(self):
        from entropower.infoscan import information_scan
        from entropower.tails import auto_window, fit_power_tail, fit_stretched_tail

        scan = information_scan(synthetic_tail_density(PowerLawTail(1.0, 1 / math.pi), core_sigma=0.05))
        assert fit_power_tail(scan, auto_window(scan)).params["alpha"] == pytest.approx(1.0, abs=0.05)
        scan = information_scan(synthetic_tail_density(StretchedTail(1.0, 1.0)))
        assert fit_stretched_tail(scan, auto_window(scan)).params["a"] == pytest.approx(1.0, abs=0.1)

    def test_depth(self):
        F = synthetic_tail_density(StretchedTail(1.0, 1.0))
        assert math.log2(F.values.max() / F.values[0]) == pytest.approx(44, abs=1.0)

    def test_splice_failure(self):
        with pytest.raises(SpliceFailure):
            synthetic_tail_density(StretchedTail(2.0, 200.0))

    @pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValidationError):
            PowerLawTail(alpha)

    def test_finite_variance_for_stretched(self):
        F = synthetic_tail_density(StretchedTail(1.0, 1.0))
        _, var = second_moment(F)
        assert math.isfinite(var)
        assert var == pytest.approx(integrate_values(F.values * F.x**2, F.grid), rel=1e-6)
