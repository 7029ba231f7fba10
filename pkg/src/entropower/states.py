"""Analytic states and densities with closed-form cross-checks.

Grid sizing
-----------
Wavefunction grids are sized for *both* conjugate sides at once: the
position half-width must hold the widest position component and also give
a fine enough momentum spacing ``2 pi hbar / (2 L)``; the position spacing
must resolve the narrowest position feature and also reach far enough in
momentum (``pi hbar / dx``). Resolution targets are 12 samples per standard
deviation, which keeps trapezoid errors on ``F**p`` below ``1e-10`` up to
``p = 100`` (the end of the default REPUR sweep).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import OutOfRange, SpliceFailure, ValidationError
from .grid import (
    Grid1D,
    SampledAmplitude,
    SampledDensity,
    normalize,
    normalize_amplitude,
)
from .special import bessel_k0
from .transform import conjugate_grid

__all__ = [
    "bessel_k0",
    "SqueezedState",
    "CauchyState",
    "PowerLawTail",
    "StretchedTail",
    "auto_grid",
    "next_pow2",
    "gaussian_state",
    "squeezed_superposition",
    "squeezed_variances",
    "cauchy_pltwp",
    "gaussian_mixture_state",
    "synthetic_tail_density",
    "uniform_density",
    "gaussian_density",
    "gaussian_mixture_density",
    "laplace_density",
    "exponential_density",
    "SQUEEZE_LIMIT",
]

SQUEEZE_LIMIT = 4.0
RESOLUTION = 12.0  # samples per standard deviation
REACH = 12.0  # standard deviations covered on either side
MIN_N = 2048
MAX_N = 2**22


def next_pow2(k: float) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(k, 1.0)))))


def auto_grid(
    center: float,
    sx_min: float,
    sx_max: float,
    sp_min: float,
    sp_max: float,
    hbar: float,
    extra_span: float = 0.0,
) -> Grid1D:
    """Power-of-two grid resolving position widths ``sx_*`` and momentum widths ``sp_*``."""
    half = max(REACH * sx_max + extra_span, RESOLUTION * math.pi * hbar / sp_min)
    dx = min(sx_min / RESOLUTION, math.pi * hbar / (REACH * sp_max))
    n = min(max(MIN_N, next_pow2(2.0 * half / dx)), MAX_N)
    return Grid1D.centered(center, half, n)


def gaussian_state(sigma: float = 1.0, center: float = 0.0, hbar: float = 1.0, n: int = None) -> SampledAmplitude:
    """Real Gaussian amplitude whose density has variance ``sigma**2``."""
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    sp = hbar / (2.0 * sigma)
    grid = auto_grid(center, sigma, sigma, sp, sp, hbar)
    if n is not None:
        grid = Grid1D.centered(center, -grid.x0 + center, n)
    x = grid.x - center
    psi = (2.0 * math.pi * sigma**2) ** -0.25 * np.exp(-(x**2) / (4.0 * sigma**2))
    return normalize_amplitude(SampledAmplitude(grid, psi))


# ---------------------------------------------------------------------------
# vacuum + squeezed vacuum superposition


@dataclass(frozen=True)
class SqueezedState:
    psi: SampledAmplitude
    psihat: SampledAmplitude
    var_x: float
    var_p: float
    zeta: float
    omega: float
    hbar: float


def _squeeze_norm2(zeta: float) -> float:
    return 1.0 / (2.0 + 2.0 / math.sqrt(math.cosh(zeta)))


def squeezed_variances(zeta: float, omega: float = 1.0, hbar: float = 1.0) -> tuple[float, float]:
    """Closed-form quadrature variances of ``N(|0> + |z_zeta>)``."""
    n2 = _squeeze_norm2(zeta)
    root_sech = math.sqrt(1.0 / math.cosh(zeta))
    th = math.tanh(zeta)
    vx = n2 * hbar / omega * (0.5 * (1.0 + math.exp(-2.0 * zeta)) + root_sech * (1.0 - th))
    vp = n2 * hbar * omega * (0.5 * (1.0 + math.exp(2.0 * zeta)) + root_sech * (1.0 + th))
    return vx, vp


def squeezed_superposition(zeta: float, omega: float = 1.0, hbar: float = 1.0) -> SqueezedState:
    """Superposition of vacuum and squeezed vacuum in the quadrature representation.

    Both amplitudes are real, zero-phase Gaussian pairs; they are exact
    Fourier partners, so ``psihat`` doubles as a check on the FFT path.
    """
    if abs(zeta) > SQUEEZE_LIMIT:
        raise OutOfRange(f"|zeta| must be <= {SQUEEZE_LIMIT}, got {zeta}")
    if not (omega > 0 and hbar > 0):
        raise ValidationError("omega and hbar must be positive")
    sx = math.sqrt(hbar / (2.0 * omega))
    sp = math.sqrt(hbar * omega / 2.0)
    ez = math.exp(zeta)
    grid = auto_grid(0.0, sx * min(1.0, 1 / ez), sx * max(1.0, 1 / ez), sp * min(1.0, ez), sp * max(1.0, ez), hbar)
    norm = math.sqrt(_squeeze_norm2(zeta))
    x = grid.x
    psi = norm * (omega / (math.pi * hbar)) ** 0.25 * (
        np.exp(-omega * x**2 / (2 * hbar)) + math.exp(zeta / 2) * np.exp(-omega * ez**2 * x**2 / (2 * hbar))
    )
    pgrid = conjugate_grid(grid, hbar)
    p = pgrid.x
    psihat = norm * (1.0 / (math.pi * hbar * omega)) ** 0.25 * (
        np.exp(-(p**2) / (2 * hbar * omega)) + math.exp(-zeta / 2) * np.exp(-(p**2) / (ez**2 * 2 * hbar * omega))
    )
    vx, vp = squeezed_variances(zeta, omega, hbar)
    return SqueezedState(
        normalize_amplitude(SampledAmplitude(grid, psi)),
        normalize_amplitude(SampledAmplitude(pgrid, psihat)),
        vx,
        vp,
        zeta,
        omega,
        hbar,
    )


# ---------------------------------------------------------------------------
# Cauchy power-law-tail wave packet


@dataclass(frozen=True)
class CauchyState:
    psi: SampledAmplitude
    psihat_analytic: SampledAmplitude
    gamma: float
    m: float
    hbar: float


CAUCHY_N = 2**20
CAUCHY_SPAN_EXPONENT = 14


def cauchy_pltwp(
    gamma: float = 1.0,
    m: float = 0.0,
    hbar: float = 1.0,
    n: int = CAUCHY_N,
    span_exponent: int = CAUCHY_SPAN_EXPONENT,
) -> CauchyState:
    """``psi(x) = sqrt(gamma/pi) / sqrt(gamma^2 + (x-m)^2)`` and its K0 momentum amplitude.

    The grid length is ``2 pi gamma 2**span_exponent`` (half-width ~5e4 gamma
    by default), so the momentum spacing is ``hbar / (gamma 2**span_exponent)``
    and dyadic momenta fall on grid nodes. Grids scale with ``gamma`` and are
    centered on ``m``; results are therefore exactly scale and shift covariant.

    The analytic amplitude has a log singularity at ``p = 0``; that node holds
    the cell average of K0 over ``[-dp/2, dp/2]``.
    """
    if not gamma > 0:
        raise ValidationError("gamma must be positive")
    if not hbar > 0:
        raise ValidationError("hbar must be positive")
    length = 2.0 * math.pi * gamma * 2.0**span_exponent
    grid = Grid1D.centered(m, length / 2.0, n)
    x = grid.x - m
    psi = math.sqrt(gamma / math.pi) / np.sqrt(gamma**2 + x**2)
    pgrid = conjugate_grid(grid, hbar)
    p = pgrid.x
    u = gamma * np.abs(p) / hbar
    k0 = np.empty_like(u)
    nz = u > 0
    k0[nz] = bessel_k0(u[nz])
    half_cell = gamma * pgrid.dx / (2.0 * hbar)
    k0[~nz] = -math.log(half_cell / 2.0) - 0.5772156649015329 + 1.0
    amp = math.sqrt(2.0 * gamma / (math.pi**2 * hbar)) * k0
    phase = np.exp(-1j * m * p / hbar)
    return CauchyState(
        normalize_amplitude(SampledAmplitude(grid, psi)),
        SampledAmplitude.from_complex(pgrid, amp * phase),
        gamma,
        m,
        hbar,
    )


def gaussian_mixture_state(
    weights: Sequence[float], centers: Sequence[float], sigmas: Sequence[float], hbar: float = 1.0
) -> SampledAmplitude:
    """Real amplitude ``sqrt(sum_i w_i N(x; c_i, s_i))``: its density is the mixture."""
    w, c, s = (np.asarray(v, dtype=float) for v in (weights, centers, sigmas))
    if not (w.shape == c.shape == s.shape) or np.any(w <= 0) or np.any(s <= 0):
        raise ValidationError("mixture needs matching positive weights/sigmas")
    spread = float(c.max() - c.min())
    mid = 0.5 * float(c.max() + c.min())
    sp_max = hbar / (2.0 * s.min())
    sp_min = hbar / (2.0 * (s.max() + spread))
    grid = auto_grid(mid, s.min(), s.max(), sp_min, sp_max, hbar, extra_span=spread / 2.0)
    dens = gaussian_mixture_density(w, c, s, grid=grid)
    return normalize_amplitude(SampledAmplitude(grid, np.sqrt(dens.values)))


# ---------------------------------------------------------------------------
# plain densities


def _gauss(x, c, s):
    return np.exp(-0.5 * ((x - c) / s) ** 2) / (s * math.sqrt(2.0 * math.pi))


def gaussian_density(sigma: float = 1.0, center: float = 0.0, half_width: float = None, n: int = 4097) -> SampledDensity:
    half = 12.0 * sigma if half_width is None else half_width
    grid = Grid1D(center - half, 2.0 * half / (n - 1), n)
    return normalize(SampledDensity(grid, _gauss(grid.x, center, sigma)))


def gaussian_mixture_density(weights, centers, sigmas, grid: Grid1D = None, n: int = 2**14) -> SampledDensity:
    w, c, s = (np.asarray(v, dtype=float) for v in (weights, centers, sigmas))
    if grid is None:
        lo = float((c - REACH * s).min())
        hi = float((c + REACH * s).max())
        grid = Grid1D(lo, (hi - lo) / (n - 1), n)
    vals = sum(wi * _gauss(grid.x, ci, si) for wi, ci, si in zip(w, c, s))
    return normalize(SampledDensity(grid, vals))


def uniform_density(length: float = 4.0, n: int = 1025) -> SampledDensity:
    """``1/L`` on ``[0, L]`` sampled at both end points."""
    if not length > 0:
        raise ValidationError("length must be positive")
    grid = Grid1D(0.0, length / (n - 1), n)
    return normalize(SampledDensity(grid, np.full(n, 1.0 / length)))


DEPTH_BITS = 44.0


def laplace_density(lam: float = 1.0, n: int = 2**16) -> SampledDensity:
    """``(lam/2) exp(-lam |y|)`` down to ~44 bits below the peak."""
    if not lam > 0:
        raise ValidationError("lam must be positive")
    half = DEPTH_BITS * math.log(2.0) / lam
    grid = Grid1D.centered(0.0, half, n)
    return normalize(SampledDensity(grid, 0.5 * lam * np.exp(-lam * np.abs(grid.x))))


def exponential_density(lam: float = 1.0, n: int = 2**16 + 1) -> SampledDensity:
    """``lam exp(-lam y)`` on ``y >= 0``."""
    if not lam > 0:
        raise ValidationError("lam must be positive")
    length = DEPTH_BITS * math.log(2.0) / lam
    grid = Grid1D(0.0, length / (n - 1), n)
    return normalize(SampledDensity(grid, lam * np.exp(-lam * grid.x)))


# ---------------------------------------------------------------------------
# synthetic tails


@dataclass(frozen=True)
class PowerLawTail:
    """``F(y) ~ c |y|^-(1+alpha)``."""

    alpha: float
    c: float = 1.0 / math.pi

    def __post_init__(self):
        if not (0 < self.alpha < 2):
            raise ValidationError("power-law alpha must lie in (0, 2)")
        if not self.c > 0:
            raise ValidationError("power-law constant must be positive")

    def __call__(self, y):
        return self.c * np.abs(y) ** -(1.0 + self.alpha)

    def log_slope(self, y: float) -> float:
        return (1.0 + self.alpha) / y

    def reach(self, level: float) -> float:
        return (self.c / level) ** (1.0 / (1.0 + self.alpha))


@dataclass(frozen=True)
class StretchedTail:
    """``F(y) ~ d 2^(-beta |y|^a)``."""

    a: float
    beta: float
    d: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.beta > 0 and self.d > 0):
            raise ValidationError("stretched tail needs a, beta, d > 0")

    def __call__(self, y):
        return self.d * np.exp2(-self.beta * np.abs(y) ** self.a)

    def log_slope(self, y: float) -> float:
        return self.beta * self.a * math.log(2.0) * y ** (self.a - 1.0)

    def reach(self, level: float) -> float:
        return (math.log2(self.d / level) / self.beta) ** (1.0 / self.a)


TailModel = Union[PowerLawTail, StretchedTail]


def synthetic_tail_density(model: TailModel, core_sigma: float = 1.0, depth_bits: float = None) -> SampledDensity:
    """Symmetric density equal to ``model`` beyond ``3*core_sigma`` with a Gaussian-shaped core.

    The core ``A exp(-b y^2)`` is fixed by matching value and slope at the
    splice point (C1 splice). The grid reaches ``depth_bits`` below the peak
    (44 bits for stretched tails, 30 for power laws). At the 2**22 size cap the
    reach shrinks rather than the spacing, so shallow power laws get less depth.
    """
    if not core_sigma > 0:
        raise ValidationError("core_sigma must be positive")
    ys = 3.0 * core_sigma
    tail_at = float(model(ys))
    b = model.log_slope(ys) / (2.0 * ys)
    if not (tail_at > 0 and math.isfinite(tail_at) and b > 0 and math.isfinite(b)):
        raise SpliceFailure("tail law is not positive and decreasing at the splice point")
    log_amp = math.log(tail_at) + b * ys * ys
    if not math.isfinite(log_amp) or log_amp > 700:
        raise SpliceFailure("core amplitude overflows; choose a wider core")
    peak = math.exp(log_amp)
    if depth_bits is None:
        depth_bits = 30.0 if isinstance(model, PowerLawTail) else DEPTH_BITS
    half = max(model.reach(peak * 2.0**-depth_bits), 2.0 * ys)
    # at most half a default scan bin of information per sample at the reach
    info_step = 0.5 * 40.0 / 1024 / (model.log_slope(half) / math.log(2.0))
    dx = min(1.0 / math.sqrt(2.0 * b) / RESOLUTION, ys / 30.0, info_step)
    n = next_pow2(2.0 * half / dx)
    if n > MAX_N:
        # resolution wins over depth at the size cap
        n = MAX_N
        half = max(0.5 * n * dx, 2.0 * ys)
    grid = Grid1D.centered(0.0, half, n)
    y = np.abs(grid.x)
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.where(y < ys, peak * np.exp(-b * y * y), model(np.maximum(y, ys)))
    return normalize(SampledDensity(grid, vals))
