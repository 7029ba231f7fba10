"""Uniform 1-D grids, sampled densities/amplitudes, quadrature and norms.

Densities and amplitudes are immutable value objects; every function here
returns new objects instead of mutating its inputs.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import GridFormatError, NonPositiveOrder, ValidationError, ZeroMass

__all__ = [
    "Grid1D",
    "SampledDensity",
    "SampledAmplitude",
    "PowerTail",
    "quadrature_weights",
    "integrate",
    "integrate_values",
    "normalize",
    "normalize_amplitude",
    "lp_norm",
    "density_from_amplitude",
    "amplitude_from_density",
    "power_tails",
    "read_csv",
    "density_to_csv",
    "amplitude_to_csv",
]

ZERO_MASS_FLOOR = 1e-300
CSV_SPACING_RTOL = 1e-8


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x0 + k*dx`` for ``k in range(n)``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not (self.dx > 0 and math.isfinite(self.dx)):
            raise ValidationError(f"grid spacing must be positive, got {self.dx}")
        if int(self.n) != self.n or self.n < 8:
            raise ValidationError(f"grid needs at least 8 samples, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def centered(cls, center: float, half_width: float, n: int) -> "Grid1D":
        """Grid of ``n`` points with spacing ``2*half_width/n`` and ``center`` on a node.

        The node layout matches the FFT convention (index ``n//2`` sits on
        ``center``), so the grid is symmetric up to one sample.
        """
        dx = 2.0 * half_width / n
        return cls(center - (n // 2) * dx, dx, n)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x_last(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def scaled(self, factor: float) -> "Grid1D":
        return Grid1D(self.x0 * factor, self.dx * factor, self.n)

    def shifted(self, offset: float) -> "Grid1D":
        return Grid1D(self.x0 + offset, self.dx, self.n)


def _as_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """Nonnegative function on a uniform grid (a PDF once normalized)."""

    grid: Grid1D
    values: np.ndarray
    dim: int = 1

    def __post_init__(self):
        vals = _as_array(self.values)
        if vals.shape != (self.grid.n,):
            raise ValidationError(f"expected {self.grid.n} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("density values must be finite")
        if np.any(vals < 0):
            # round-off from |psi|^2 never goes negative, so this is user error
            raise ValidationError("density values must be nonnegative")
        object.__setattr__(self, "values", vals)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def mass(self) -> float:
        return integrate(self)


@dataclass(frozen=True, eq=False)
class SampledAmplitude:
    """Complex wavefunction sampled on a uniform grid."""

    grid: Grid1D
    re: np.ndarray
    im: Optional[np.ndarray] = None
    dim: int = 1

    def __post_init__(self):
        re = _as_array(self.re)
        im = _as_array(np.zeros_like(re) if self.im is None else self.im)
        if re.shape != (self.grid.n,) or im.shape != (self.grid.n,):
            raise ValidationError("amplitude arrays must match the grid size")
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise ValidationError("amplitude values must be finite")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, grid: Grid1D, psi: np.ndarray, dim: int = 1) -> "SampledAmplitude":
        psi = np.asarray(psi)
        return cls(grid, psi.real.copy(), psi.imag.copy(), dim)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def psi(self) -> np.ndarray:
        return self.re + 1j * self.im

    @property
    def modulus(self) -> np.ndarray:
        return np.hypot(self.re, self.im)


def quadrature_weights(n: int, dx: float) -> np.ndarray:
    """Composite Simpson weights for odd ``n``, trapezoid weights for even ``n``."""
    w = np.full(n, dx)
    if n % 2 == 1:
        w[1:-1:2] = 4.0 * dx / 3.0
        w[2:-1:2] = 2.0 * dx / 3.0
        w[0] = w[-1] = dx / 3.0
    else:
        w[0] = w[-1] = dx / 2.0
    return w


def integrate_values(values: np.ndarray, grid: Grid1D) -> float:
    """Quadrature of raw samples on ``grid``."""
    values = np.asarray(values, dtype=float)
    return float(np.dot(quadrature_weights(grid.n, grid.dx), values))


def integrate(d: SampledDensity) -> float:
    return integrate_values(d.values, d.grid)


def normalize(d: SampledDensity) -> SampledDensity:
    mass = integrate(d)
    if not mass > ZERO_MASS_FLOOR:
        raise ZeroMass(f"density has mass {mass!r}; cannot normalize")
    return SampledDensity(d.grid, d.values / mass, d.dim)


def normalize_amplitude(a: SampledAmplitude) -> SampledAmplitude:
    norm2 = integrate_values(a.re**2 + a.im**2, a.grid)
    if not norm2 > ZERO_MASS_FLOOR:
        raise ZeroMass("amplitude has zero L2 norm")
    s = 1.0 / math.sqrt(norm2)
    return SampledAmplitude(a.grid, a.re * s, a.im * s, a.dim)


def lp_norm(a: Union[SampledAmplitude, SampledDensity], p: float) -> float:
    """``(integral |a|^p dx)^(1/p)``; densities are treated as real functions."""
    if not p > 0:
        raise NonPositiveOrder(f"L^p order must be positive, got {p}")
    mod = a.modulus if isinstance(a, SampledAmplitude) else np.abs(a.values)
    return integrate_values(mod**p, a.grid) ** (1.0 / p)


def density_from_amplitude(a: SampledAmplitude) -> SampledDensity:
    """``|psi|^2`` as a density (not renormalized; a zero amplitude gives zero)."""
    return SampledDensity(a.grid, a.re**2 + a.im**2, a.dim)


def amplitude_from_density(d: SampledDensity) -> SampledAmplitude:
    """Real, zero-phase amplitude ``sqrt(F)``."""
    return SampledAmplitude(d.grid, np.sqrt(d.values), None, d.dim)


# ---------------------------------------------------------------------------
# power-law tail model of the outer bins


@dataclass(frozen=True)
class PowerTail:
    """``F(x) ~ exp(log_coefficient) * d**(-exponent)``, ``d`` the distance from the peak.

    ``edge`` is the distance of the outermost sample; the tail integrals
    cover ``[edge, inf)``. Everything is evaluated in log space because fits
    to light (e.g. Gaussian) tails give astronomically large coefficients.
    """

    side: int
    log_coefficient: float
    exponent: float
    edge: float
    peak_position: float

    def log_edge_value(self) -> float:
        return self.log_coefficient - self.exponent * math.log(self.edge)

    def _edge_power(self, p: float, log_scale: float) -> float:
        # (F(edge)/scale)^p * edge
        return math.exp(p * (self.log_edge_value() - log_scale) + math.log(self.edge))

    def doubling_increment(self, p: float, log_scale: float = 0.0) -> float:
        """``integral_{edge}^{2 edge} (F/scale)^p`` under the fitted law."""
        q = p * self.exponent
        log_base = p * (self.log_edge_value() - log_scale) + math.log(self.edge)
        if abs(q - 1.0) < 1e-12:
            return math.exp(log_base) * math.log(2.0)
        # (2^(1-q) - 1)/(1-q), kept in logs so growing fits cannot overflow
        log_factor = math.log(abs(math.expm1((1.0 - q) * math.log(2.0)) / (1.0 - q)))
        return math.exp(min(log_base + log_factor, 700.0))

    def power_integral(self, p: float, log_scale: float = 0.0) -> float:
        """``integral_{edge}^{inf} (F/scale)^p``; ``inf`` when not integrable."""
        q = p * self.exponent
        if q <= 1.0:
            return math.inf
        return self._edge_power(p, log_scale) / (q - 1.0)

    def entropy_integral(self) -> float:
        """``integral_{edge}^{inf} F ln F`` (nats)."""
        s = self.exponent
        if s <= 1.0:
            return -math.inf
        lf = self.log_edge_value()
        return self._edge_power(1.0, 0.0) / (s - 1.0) * (lf - s / (s - 1.0))

    def shifted_moment(self, shift: float, k: int) -> float:
        """``integral_{edge}^{inf} (d + shift)^k F(d) dd``."""
        total = 0.0
        for j in range(k + 1):
            cj = math.comb(k, j) * shift ** (k - j)
            if cj == 0.0:
                continue
            if self.exponent - j <= 1.0:
                return math.inf
            total += cj * self._edge_power(1.0, 0.0) * self.edge**j / (self.exponent - j - 1.0)
        return total


TAIL_FRACTION = 0.10
TAIL_EDGE_RATIO = 1e-3
NOISE_FLOOR = 1e-12


def power_tails(values: np.ndarray, grid: Grid1D) -> list[PowerTail]:
    """Fit power laws to the outer 10% of bins on each side of the peak.

    A side gets no tail when the density is compactly supported there
    (zeros in the outer bins) or was cut off while still large (edge value
    above ``1e-3`` of the peak).
    """
    values = np.asarray(values, dtype=float)
    n = grid.n
    k_peak = int(np.argmax(values))
    peak = values[k_peak]
    if not peak > 0:
        return []
    m = max(8, int(round(TAIL_FRACTION * n)))
    x = grid.x
    x_peak = x[k_peak]
    tails = []
    for side, idx in ((-1, np.arange(0, m)), (1, np.arange(n - m, n))):
        idx = idx[(idx - k_peak) * side > 0]
        if idx.size < 4:
            continue
        v = values[idx]
        if np.any(v <= 0) or values[idx[0] if side < 0 else idx[-1]] > TAIL_EDGE_RATIO * peak:
            continue
        d = np.abs(x[idx] - x_peak)
        slope, intercept = np.polyfit(np.log(d), np.log(v), 1)
        if slope >= 0 and v.max() <= NOISE_FLOOR * peak:
            # flat or rising fit through round-off, not a tail
            continue
        tails.append(PowerTail(side, float(intercept), float(-slope), float(d.max()), float(x_peak)))
    return tails


# ---------------------------------------------------------------------------
# CSV ingestion / export


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def read_csv(source: Union[str, io.TextIOBase, Iterable[str]]):
    """Read a two-column ``x,value`` density or three-column ``x,re,im`` amplitude.

    Returns a :class:`SampledDensity` or :class:`SampledAmplitude`. A header
    row is required; grid uniformity is checked to ``1e-8`` relative spacing.
    """
    if isinstance(source, str):
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise GridFormatError("CSV needs a header row and data rows")
    header, body = rows[0], rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in body])
    except ValueError as exc:
        raise GridFormatError(f"non-numeric CSV entry: {exc}") from None
    if data.ndim != 2 or data.shape[1] not in (2, 3) or data.shape[1] != len(header):
        raise GridFormatError("expected 2 (x,value) or 3 (x,re,im) columns")
    x = data[:, 0]
    if x.size < 8:
        raise GridFormatError("need at least 8 rows")
    steps = np.diff(x)
    dx = (x[-1] - x[0]) / (x.size - 1)
    if not dx > 0 or np.max(np.abs(steps - dx)) > CSV_SPACING_RTOL * dx:
        raise GridFormatError("x column is not a uniform increasing grid")
    grid = Grid1D(float(x[0]), float(dx), x.size)
    if data.shape[1] == 2:
        return SampledDensity(grid, data[:, 1])
    return SampledAmplitude(grid, data[:, 1], data[:, 2])


def density_to_csv(d: SampledDensity) -> str:
    out = io.StringIO()
    out.write("x,value\n")
    for xi, vi in zip(d.x, d.values):
        out.write(f"{_fmt(xi)},{_fmt(vi)}\n")
    return out.getvalue()


def amplitude_to_csv(a: SampledAmplitude) -> str:
    out = io.StringIO()
    out.write("x,re,im\n")
    for xi, r, i in zip(a.x, a.re, a.im):
        out.write(f"{_fmt(xi)},{_fmt(r)},{_fmt(i)}\n")
    return out.getvalue()
