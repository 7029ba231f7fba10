"""Entropy-power uncertainty relations (REPURs) for conjugate wavefunctions.

For Hölder-linked indices ``t = -r/(2r+1)`` every pure state obeys::

    N_{1+t}(|psi|^2) * N_{1+r}(|psihat|^2) >= hbar^2 / 4

with equality for Gaussians. The endpoint ``r = -1/2`` pairs the sup-norm
power of the position density with the ``1/2``-power of the momentum
density; ``r = inf`` is the mirrored pairing.

When a ``1/2``-power diverges its partner is the sup norm of the Fourier
image, which is then bounded only by a divergent L1 norm. Such a product
is reported as indeterminate, never as a number.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import OutOfRange
from .formatting import csv_value, json_value
from .grid import SampledAmplitude, SampledDensity, density_from_amplitude, power_tails, quadrature_weights
from .renyi import DIVERGENCE_RTOL, EntropyIndex, evaluate
from .transform import fourier_conjugate

__all__ = [
    "ConjugatePair",
    "RepurRow",
    "RepurTable",
    "VurChain",
    "conjugate_index",
    "default_r_grid",
    "repur_product",
    "repur_row",
    "repur_sweep",
    "vur_chain",
    "second_moment",
    "worker_count",
    "SATURATION_RTOL",
    "BOUND_SLACK",
]

SATURATION_RTOL = 1e-3
BOUND_SLACK = 1e-4
CSV_COLUMNS = ("r", "t", "power_x", "power_p", "product", "gap", "saturated")


def _extended(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "+inf", "∞"):
        return math.inf
    try:
        return float(value)
    except ValueError:
        raise OutOfRange(f"cannot parse r={value!r}") from None


@dataclass(frozen=True)
class ConjugatePair:
    """Indices ``(r, t)`` with ``t = -r/(2r+1)``; ``-1/2`` and ``inf`` are partners."""

    r: float
    t: float

    @property
    def position_index(self) -> EntropyIndex:
        return EntropyIndex(1.0 + self.t)

    @property
    def momentum_index(self) -> EntropyIndex:
        return EntropyIndex(1.0 + self.r)

    def swapped(self) -> "ConjugatePair":
        return ConjugatePair(self.t, self.r)


def conjugate_index(r) -> ConjugatePair:
    r = _extended(r)
    if math.isnan(r) or r < -0.5:
        raise OutOfRange(f"r must lie in [-1/2, inf], got {r}")
    if r == -0.5:
        return ConjugatePair(-0.5, math.inf)
    if math.isinf(r):
        return ConjugatePair(math.inf, -0.5)
    t = -r / (2.0 * r + 1.0)
    return ConjugatePair(r, t + 0.0)


@dataclass(frozen=True)
class RepurRow:
    r: float
    t: float
    power_x: float
    power_p: float
    product: float  # nan when indeterminate
    gap: float
    saturated: bool
    indeterminate: bool = False

    def values(self) -> dict:
        return {
            "r": self.r,
            "t": self.t,
            "power_x": self.power_x,
            "power_p": self.power_p,
            "product": self.product,
            "gap": self.gap,
            "saturated": self.saturated,
        }


@dataclass(frozen=True)
class RepurTable:
    rows: list
    hbar: float
    state_label: str = ""

    def products(self) -> np.ndarray:
        return np.array([row.product for row in self.rows])

    def row(self, r) -> RepurRow:
        r = _extended(r)
        for row in self.rows:
            if row.r == r:
                return row
        raise KeyError(r)

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            vals = row.values()
            cells = []
            for col in CSV_COLUMNS:
                ind = row.indeterminate and col in ("product", "gap")
                cells.append(csv_value(vals[col], ind))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        rows = []
        for row in self.rows:
            vals = row.values()
            rows.append({k: json_value(v, row.indeterminate and k in ("product", "gap")) for k, v in vals.items()})
        return {"state": self.state_label, "hbar": json_value(self.hbar), "bound": json_value(self.hbar**2 / 4), "rows": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _ConjugateDensities:
    """Position and momentum densities with memoized entropy powers."""

    def __init__(self, fx: SampledDensity, fp: SampledDensity):
        self.fx = fx
        self.fp = fp
        self._cache = {}

    def power(self, side: str, idx: EntropyIndex):
        key = (side, idx.p)
        if key not in self._cache:
            self._cache[key] = evaluate(self.fx if side == "x" else self.fp, idx)
        return self._cache[key]


def _prepare(psi: SampledAmplitude, hbar: float, psihat: Optional[SampledAmplitude]) -> _ConjugateDensities:
    if psihat is None:
        psihat = fourier_conjugate(psi, hbar)
    return _ConjugateDensities(density_from_amplitude(psi), density_from_amplitude(psihat))


def _row(pair: ConjugatePair, dens: _ConjugateDensities, hbar: float) -> RepurRow:
    ex = dens.power("x", pair.position_index)
    ep = dens.power("p", pair.momentum_index)
    bound = hbar * hbar / 4.0
    # a divergent 1/2-power makes the partner sup norm unbounded: 0 * inf
    indeterminate = (ex.diverged and ep.index.is_infinite) or (ep.diverged and ex.index.is_infinite)
    if indeterminate:
        return RepurRow(pair.r, pair.t, ex.power, ep.power, math.nan, math.nan, False, True)
    product = ex.power * ep.power
    gap = product - bound
    saturated = math.isfinite(product) and abs(gap) <= SATURATION_RTOL * bound
    return RepurRow(pair.r, pair.t, ex.power, ep.power, product, gap, saturated)


def repur_row(fx: SampledDensity, fp: SampledDensity, r, hbar: float = 1.0) -> RepurRow:
    """Row for densities already in hand (``fx`` position, ``fp`` momentum)."""
    return _row(conjugate_index(r), _ConjugateDensities(fx, fp), hbar)


def repur_product(
    psi: SampledAmplitude, r, hbar: float = 1.0, psihat: Optional[SampledAmplitude] = None
) -> RepurRow:
    """``N_{1+t}(|psi|^2) N_{1+r}(|psihat|^2)`` with gap and saturation flag."""
    return _row(conjugate_index(r), _prepare(psi, hbar, psihat), hbar)


def default_r_grid(points: int = 41) -> list:
    """``points`` log-spaced values of ``1+r`` on ``[0.5, 100]`` plus ``r=0`` and ``r=inf``."""
    rs = list(np.exp(np.linspace(math.log(0.5), math.log(100.0), points)) - 1.0)
    rs[0] = -0.5
    rs.append(0.0)
    rs.append(math.inf)
    return sorted(set(float(r) for r in rs))


def worker_count() -> int:
    raw = os.environ.get("REPUR_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def repur_sweep(
    psi: SampledAmplitude,
    r_grid: Optional[Iterable] = None,
    hbar: float = 1.0,
    psihat: Optional[SampledAmplitude] = None,
    state_label: str = "",
    threads: Optional[int] = None,
) -> RepurTable:
    """Evaluate the REPUR family over ``r_grid`` (default :func:`default_r_grid`).

    Rows are computed concurrently (``REPUR_THREADS`` or ``threads``) and
    returned sorted by ``r`` regardless of completion order.
    """
    pairs = [conjugate_index(r) for r in (default_r_grid() if r_grid is None else r_grid)]
    pairs.sort(key=lambda pr: pr.r)
    dens = _prepare(psi, hbar, psihat)
    n_workers = threads if threads is not None else worker_count()
    if n_workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(lambda pr: _row(pr, dens, hbar), pairs))
    else:
        rows = [_row(pr, dens, hbar) for pr in pairs]
    return RepurTable(rows, hbar, state_label)


# ---------------------------------------------------------------------------
# variance chain


def second_moment(F: SampledDensity) -> tuple[float, float]:
    """Mean and variance of ``F``, tail-completed; variance is ``inf`` for heavy tails."""
    grid = F.grid
    w = quadrature_weights(grid.n, grid.dx)
    vals = F.values
    x = grid.x
    mass = float(np.dot(w, vals))
    mean = float(np.dot(w, vals * x)) / mass
    var_grid = float(np.dot(w, vals * (x - mean) ** 2))
    extra = 0.0
    for tail in power_tails(vals, grid):
        s = tail.exponent
        e = tail.edge
        log_c = tail.log_coefficient
        shift = tail.side * (tail.peak_position - mean)
        # increment of (d+shift)^2 F over [edge, 2 edge], leading term
        if s != 3.0:
            inc = math.exp(log_c + (3.0 - s) * math.log(e)) * abs(2.0 ** (3.0 - s) - 1.0) / abs(3.0 - s)
        else:
            inc = math.exp(log_c) * math.log(2.0)
        if inc <= 1e-13 * max(var_grid, 1e-300):
            continue
        if s <= 3.0:
            if inc > DIVERGENCE_RTOL * var_grid:
                return mean, math.inf
            continue
        extra += tail.shifted_moment(shift, 2)
    return mean, (var_grid + extra) / mass


@dataclass(frozen=True)
class VurChain:
    sigma2_x: float
    sigma2_p: float
    variance_product: float
    shannon_product: float
    bound: float
    chain_ok: bool


def vur_chain(psi: SampledAmplitude, hbar: float = 1.0, psihat: Optional[SampledAmplitude] = None) -> VurChain:
    """``sigma_x^2 sigma_p^2 >= N_1 N_1 >= hbar^2/4`` with ``1e-4`` relative slack."""
    dens = _prepare(psi, hbar, psihat)
    _, vx = second_moment(dens.fx)
    _, vp = second_moment(dens.fp)
    one = EntropyIndex(1.0)
    shannon = dens.power("x", one).power * dens.power("p", one).power
    bound = hbar * hbar / 4.0
    vprod = vx * vp
    ok = vprod >= shannon * (1.0 - BOUND_SLACK) and shannon >= bound * (1.0 - BOUND_SLACK)
    return VurChain(vx, vp, vprod, shannon, bound, bool(ok))
