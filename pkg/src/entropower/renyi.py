"""Differential Rényi/Shannon entropies and Rényi entropy powers.

Entropies are computed in nats internally and reported in bits. The
density is "tail completed" before any integral is taken: a power law
fitted to the outer 10% of bins on each side is integrated analytically
out to infinity. This keeps heavy-tailed densities (Cauchy) accurate for
orders ``p`` in ``(1/2, 1)`` where truncation alone converges very slowly,
and it is what decides divergence for ``p < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import OutOfRange, ValidationError
from .grid import PowerTail, SampledDensity, integrate_values, power_tails, quadrature_weights

__all__ = [
    "EntropyIndex",
    "EntropyResult",
    "INFINITY",
    "as_index",
    "evaluate",
    "renyi_entropy",
    "shannon_entropy",
    "entropy_power",
    "power_prefactor",
    "holder_conjugate",
    "DIVERGENCE_RTOL",
]

LN2 = math.log(2.0)
DIVERGENCE_RTOL = 1e-4
# a fitted tail whose doubling increment is below this (relative) is the FFT
# noise floor or an exponentially small remainder, not a physical tail
NEGLIGIBLE_TAIL = 1e-13
# |p - 1| below this is evaluated as Shannon: the 1/(1-p) form loses all
# digits there, while the snap costs only ~(p-1) * varentropy
SHANNON_SNAP = 1e-9


@dataclass(frozen=True, order=True)
class EntropyIndex:
    """Rényi order: finite ``p > 0`` or ``p = inf``.

    The notations ``N_{inf/2}`` and ``N_inf`` used for the sup-norm entropy
    power refer to the same object, which is ``EntropyIndex(math.inf)``.
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or not p > 0:
            raise OutOfRange(f"Rényi index must be positive, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text: Union[str, float, "EntropyIndex"]) -> "EntropyIndex":
        if isinstance(text, EntropyIndex):
            return text
        if isinstance(text, str):
            t = text.strip().lower()
            if t in ("inf", "infinity", "+inf", "∞"):
                return cls(math.inf)
            try:
                value = float(t)
            except ValueError:
                raise ValidationError(f"cannot parse Rényi index {text!r}") from None
            return cls(value)
        return cls(float(text))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_shannon(self) -> bool:
        return abs(self.p - 1.0) <= SHANNON_SNAP

    def __str__(self) -> str:
        return "inf" if self.is_infinite else f"{self.p:g}"


INFINITY = EntropyIndex(math.inf)


def as_index(idx) -> EntropyIndex:
    return EntropyIndex.parse(idx)


@dataclass(frozen=True)
class EntropyResult:
    entropy_bits: float
    power: float
    index: EntropyIndex
    diverged: bool = False
    tail_exponent: Optional[float] = None  # fitted power-law exponent, when a tail decided divergence


def power_prefactor(idx: EntropyIndex) -> float:
    """``(1/2pi) p^(-p'/p)``, with the limits ``1/(2 pi e)`` at p=1 and ``1/(2pi)`` at p=inf."""
    p = idx.p
    if math.isinf(p):
        return 1.0 / (2.0 * math.pi)
    if idx.is_shannon:
        return 1.0 / (2.0 * math.pi * math.e)
    return p ** (-1.0 / (p - 1.0)) / (2.0 * math.pi)


def _tails(F: SampledDensity) -> list[PowerTail]:
    return power_tails(F.values, F.grid)


def _tail_sum(tails, p, log_scale, grid_integral):
    """Sum the tail integrals of (F/scale)^p; returns (total, diverged, exponent)."""
    total = 0.0
    for tail in tails:
        inc = tail.doubling_increment(p, log_scale)
        if inc <= NEGLIGIBLE_TAIL * grid_integral:
            continue
        if p * tail.exponent <= 1.0:
            if inc > DIVERGENCE_RTOL * grid_integral:
                return math.inf, True, tail.exponent
            continue
        total += tail.power_integral(p, log_scale)
    return total, False, None


def _mass(F: SampledDensity, tails) -> float:
    q = integrate_values(F.values, F.grid)
    extra, diverged, _ = _tail_sum(tails, 1.0, 0.0, q)
    return q if diverged else q + extra


def _entropy_nats(F: SampledDensity, idx: EntropyIndex):
    vals = F.values
    peak = float(vals.max())
    if not peak > 0:
        raise ValidationError("density is identically zero")
    tails = _tails(F)
    mass = _mass(F, tails)
    log_mass = math.log(mass)
    p = idx.p
    if math.isinf(p):
        return -(math.log(peak) - log_mass), False, None
    w = quadrature_weights(F.grid.n, F.grid.dx)
    if idx.is_shannon:
        nz = vals > 0
        q_flnf = float(np.dot(w[nz], vals[nz] * np.log(vals[nz])))
        q_mass = float(np.dot(w, vals))
        t_flnf = 0.0
        for tail in tails:
            inc = tail.doubling_increment(1.0)
            if inc <= NEGLIGIBLE_TAIL * q_mass:
                continue
            if tail.exponent <= 1.0:
                return math.inf, True, tail.exponent
            t_flnf += tail.entropy_integral()
        return -(q_flnf + t_flnf) / mass + log_mass, False, None
    # scale by the peak so that F^p never under/overflows
    log_peak = math.log(peak)
    scaled = (vals / peak) ** p
    q_p = float(np.dot(w, scaled))
    extra, diverged, expo = _tail_sum(tails, p, log_peak, q_p)
    if diverged:
        # only reachable for p < 1: the entropy is +inf
        return math.inf, True, expo
    log_int = math.log(q_p + extra) + p * (log_peak - log_mass)
    return log_int / (1.0 - p), False, None


def evaluate(F: SampledDensity, idx) -> EntropyResult:
    """Rényi entropy (bits) and entropy power of ``F`` at index ``idx``.

    Divergent integrals (e.g. ``p = 1/2`` on a Cauchy density) are reported
    as ``+inf`` with ``diverged=True`` rather than raised.
    """
    idx = as_index(idx)
    h_nats, diverged, expo = _entropy_nats(F, idx)
    if diverged:
        return EntropyResult(math.inf, math.inf, idx, True, expo)
    power = power_prefactor(idx) * math.exp(2.0 * h_nats / F.dim)
    return EntropyResult(h_nats / LN2, power, idx, False, None)


def renyi_entropy(F: SampledDensity, idx) -> float:
    """Differential Rényi entropy in bits (``+inf`` when divergent)."""
    return evaluate(F, idx).entropy_bits


def shannon_entropy(F: SampledDensity) -> float:
    return evaluate(F, 1.0).entropy_bits


def entropy_power(F: SampledDensity, idx) -> float:
    """Rényi entropy power: the variance of the Gaussian with the same ``I_p``."""
    return evaluate(F, idx).power


def holder_conjugate(idx) -> EntropyIndex:
    """``p' = p/(p-1)``; 1 and infinity are conjugate to each other."""
    idx = as_index(idx)
    p = idx.p
    if math.isinf(p):
        return EntropyIndex(1.0)
    if p < 1.0:
        raise OutOfRange(f"Hölder conjugate needs p >= 1, got {p}")
    if p == 1.0:
        return INFINITY
    return EntropyIndex(p / (p - 1.0))
