import io
import math

import numpy as np
import pytest
from scipy.special import erf

from entropower.errors import GridFormatError, NonPositiveOrder, ValidationError, ZeroMass
from entropower.grid import (
    Grid1D,
    SampledAmplitude,
    SampledDensity,
    amplitude_to_csv,
    density_from_amplitude,
    density_to_csv,
    integrate,
    integrate_values,
    lp_norm,
    normalize,
    normalize_amplitude,
    power_tails,
    read_csv,
)
from entropower.states import gaussian_state


def gaussian_on(lo, hi, n, sigma=1.0):
    grid = Grid1D(lo, (hi - lo) / (n - 1), n)
    x = grid.x
    return SampledDensity(grid, np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi)))


class TestGrid:
    def test_coordinates(self):
        g = Grid1D(-1.0, 0.5, 8)
        np.testing.assert_allclose(g.x, -1.0 + 0.5 * np.arange(8))
        assert g.x_last == pytest.approx(2.5)

    @pytest.mark.parametrize("dx,n", [(0.0, 8), (-1.0, 8), (0.1, 7), (math.nan, 10)])
    def test_invalid(self, dx, n):
        with pytest.raises(ValidationError):
            Grid1D(0.0, dx, n)

    def test_centered_puts_center_on_node(self):
        g = Grid1D.centered(3.0, 2.0, 16)
        assert g.x[8] == pytest.approx(3.0)


class TestIntegrate:
    def test_uniform(self):
        grid = Grid1D(0.0, 4.0 / 1024, 1025)
        assert integrate(SampledDensity(grid, np.full(1025, 0.25))) == pytest.approx(1.0, abs=1e-12)

    def test_gaussian(self):
        assert integrate(gaussian_on(-12, 12, 4097)) == pytest.approx(erf(12 / math.sqrt(2)), abs=1e-10)

    def test_half_gaussian(self):
        assert integrate(gaussian_on(0, 12, 2049)) == pytest.approx(0.5 * erf(12 / math.sqrt(2)), abs=1e-10)

    def test_simpson_order(self):
        # fourth moment of a Gaussian on a coarse grid; halving dx should gain >= 8x
        errs = []
        for n in (33, 65, 129):
            d = gaussian_on(-3, 3, n)
            exact = 3.0 * erf(3 / math.sqrt(2)) - math.sqrt(2 / math.pi) * math.exp(-4.5) * (27 + 9)
            errs.append(abs(integrate_values(d.values * d.x**4, d.grid) - exact))
        assert errs[0] / errs[1] >= 8 and errs[1] / errs[2] >= 8

    def test_trapezoid_for_even_n(self):
        grid = Grid1D(0.0, 1.0, 8)
        assert integrate(SampledDensity(grid, np.arange(8.0))) == pytest.approx(24.5)


class TestNormalize:
    def test_constant(self):
        grid = Grid1D(0.0, 1.0 / 8, 9)
        out = normalize(SampledDensity(grid, np.full(9, 2.0)))
        np.testing.assert_allclose(out.values, 1.0)

    def test_scale_out(self):
        d = gaussian_on(-12, 12, 4097)
        out = normalize(SampledDensity(d.grid, 3 * d.values))
        np.testing.assert_allclose(out.values, normalize(d).values, rtol=1e-14)
        assert integrate(out) == pytest.approx(1.0, abs=1e-12)

    def test_zero(self):
        with pytest.raises(ZeroMass):
            normalize(SampledDensity(Grid1D(0, 1, 8), np.zeros(8)))

    def test_idempotent(self):
        once = normalize(gaussian_on(-5, 5, 257))
        twice = normalize(once)
        np.testing.assert_allclose(once.values, twice.values, rtol=1e-12)

    def test_inputs_not_mutated(self):
        d = gaussian_on(-5, 5, 257)
        before = d.values.copy()
        normalize(d)
        np.testing.assert_array_equal(d.values, before)
        with pytest.raises(ValueError):
            d.values[0] = 1.0

    def test_negative_values_rejected(self):
        with pytest.raises(ValidationError):
            SampledDensity(Grid1D(0, 1, 8), -np.ones(8))


class TestNorms:
    def test_unit_l2(self):
        psi = gaussian_state(1.0)
        assert lp_norm(psi, 2) == pytest.approx(1.0, abs=1e-9)

    def test_gaussian_l1(self):
        psi = gaussian_state(1.0)
        assert lp_norm(psi, 1) == pytest.approx((8 * math.pi) ** 0.25, abs=1e-6)

    def test_indicator_l4(self):
        grid = Grid1D(-2.0, 1.0 / 256, 1025)
        x = grid.x
        re = np.where(np.abs(x) <= 1.0, 1 / math.sqrt(2), 0.0)
        # the jump costs O(dx) at each edge
        assert lp_norm(SampledAmplitude(grid, re), 4) == pytest.approx(2**-0.25, abs=1e-3)

    @pytest.mark.parametrize("p", [0.0, -1.0])
    def test_order(self, p):
        with pytest.raises(NonPositiveOrder):
            lp_norm(gaussian_state(1.0), p)


class TestDensityFromAmplitude:
    def test_width_relation(self):
        # amplitude exp(-x^2/(2 s^2)) gives a density with sigma = s / sqrt(2)
        s = 1.3
        grid = Grid1D.centered(0.0, 15 * s, 4096)
        amp = normalize_amplitude(SampledAmplitude(grid, np.exp(-grid.x**2 / (2 * s * s))))
        d = density_from_amplitude(amp)
        assert integrate_values(d.values * d.x**2, d.grid) == pytest.approx(s * s / 2, rel=1e-10)

    def test_phase_invariance(self):
        psi = gaussian_state(1.0)
        phased = SampledAmplitude.from_complex(psi.grid, psi.psi * np.exp(1j * np.sin(3 * psi.x)))
        np.testing.assert_allclose(density_from_amplitude(phased).values, density_from_amplitude(psi).values, atol=1e-15)

    def test_mass_equals_l2_squared(self):
        psi = gaussian_state(0.7)
        assert integrate(density_from_amplitude(psi)) == pytest.approx(lp_norm(psi, 2) ** 2, abs=1e-9)
        assert integrate(density_from_amplitude(psi)) == pytest.approx(1.0, abs=1e-9)

    def test_zero_amplitude(self):
        amp = SampledAmplitude(Grid1D(0, 1, 8), np.zeros(8))
        d = density_from_amplitude(amp)
        assert not d.values.any()
        with pytest.raises(ZeroMass):
            normalize(d)


class TestPowerTails:
    def test_recovers_cauchy_exponent(self):
        grid = Grid1D.centered(0.0, 5000.0, 2**16)
        vals = 1 / (math.pi * (1 + grid.x**2))
        tails = power_tails(vals, grid)
        assert len(tails) == 2
        for t in tails:
            assert t.exponent == pytest.approx(2.0, abs=1e-3)
            assert math.exp(t.log_coefficient) == pytest.approx(1 / math.pi, rel=1e-2)

    def test_compact_support_has_no_tail(self):
        grid = Grid1D(-2, 4 / 255, 256)
        vals = np.where(np.abs(grid.x) < 1, 1.0, 0.0)
        assert power_tails(vals, grid) == []

    def test_tail_integral(self):
        grid = Grid1D.centered(0.0, 5000.0, 2**16)
        vals = 1 / (math.pi * (1 + grid.x**2))
        tail = power_tails(vals, grid)[1]
        # mass beyond the edge: (1/pi) / edge for an x^-2 law
        assert tail.power_integral(1.0) == pytest.approx(1 / (math.pi * tail.edge), rel=1e-3)
        assert math.isinf(tail.power_integral(0.5))


class TestCsv:
    def test_density_round_trip(self):
        d = gaussian_on(-4, 4, 65)
        back = read_csv(io.StringIO(density_to_csv(d)))
        assert isinstance(back, SampledDensity)
        np.testing.assert_allclose(back.values, d.values, rtol=1e-11)
        assert back.grid.dx == pytest.approx(d.grid.dx, rel=1e-11)

    def test_amplitude_round_trip(self):
        psi = gaussian_state(1.0)
        back = read_csv(io.StringIO(amplitude_to_csv(psi)))
        assert isinstance(back, SampledAmplitude)
        np.testing.assert_allclose(back.re, psi.re, rtol=1e-11, atol=1e-300)

    def test_non_uniform(self):
        text = "x,value\n" + "\n".join(f"{x},{1.0}" for x in [0, 1, 2, 3, 4.5, 5, 6, 7, 8])
        with pytest.raises(GridFormatError):
            read_csv(io.StringIO(text))

    def test_bad_columns(self):
        text = "x,a,b,c\n" + "\n".join(f"{i},1,1,1" for i in range(10))
        with pytest.raises(GridFormatError):
            read_csv(io.StringIO(text))

    def test_file_path(self, tmp_path):
        d = gaussian_on(-4, 4, 65)
        path = tmp_path / "d.csv"
        path.write_text(density_to_csv(d))
        assert isinstance(read_csv(str(path)), SampledDensity)
