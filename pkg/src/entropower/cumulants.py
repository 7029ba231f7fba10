"""Cumulants of the information variable and Gram–Charlier reconstruction of its PDF.

Two independent routes to the cumulants ``kappa_n`` of ``i = -log2 F(Y)``:

* from a tower of entropy powers ``N_{1+k Delta}`` with Grünwald–Letnikov
  differences in the Rényi index (:func:`cumulants_gldf`);
* from the moments of an information scan (:func:`cumulants_from_scan`).

For a Gaussian density the information variable is a shifted gamma
variable with shape ``1/2`` and scale ``log2 e``; its cumulants are the
reference values ``gamma_n`` returned by :func:`gaussian_reference_cumulants`.
The Gram–Charlier A series expands ``g`` about that reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import gammainc

from .errors import InsufficientTower, NonFinitePower, OrderUnsupported, OutOfRange, ValidationError
from .grid import SampledDensity
from .infoscan import InformationScan, information_scan
from .renyi import EntropyIndex, evaluate

__all__ = [
    "CumulantSet",
    "GramCharlierModel",
    "GramCharlierResult",
    "entropy_power_tower",
    "cumulants_gldf",
    "gldf_from_density",
    "cumulants_from_scan",
    "moments_to_cumulants",
    "varentropy",
    "gaussian_reference_cumulants",
    "laguerre",
    "gram_charlier_model",
    "gram_charlier_reconstruct",
    "DEFAULT_DELTA",
]

LOG2E = math.log2(math.e)
DEFAULT_DELTA = 0.01
DELTA_RANGE = (1e-3, 0.1)
MAX_LAGUERRE = 12


@dataclass(frozen=True, eq=False)
class CumulantSet:
    kappa: np.ndarray  # kappa[0] is kappa_1 (bits), kappa[n-1] is kappa_n (bits^n)
    delta: float
    dim: int = 1
    source: str = "gldf"

    def __post_init__(self):
        k = np.array(self.kappa, dtype=float)
        if k.size < 2 or not math.isfinite(k[0]):
            raise ValidationError("a cumulant set needs finite kappa_1 and at least two orders")
        k.setflags(write=False)
        object.__setattr__(self, "kappa", k)

    def __getitem__(self, n: int) -> float:
        """``kappa_n`` with 1-based ``n``."""
        if n < 1:
            raise IndexError(n)
        return float(self.kappa[n - 1])

    @property
    def order(self) -> int:
        return int(self.kappa.size)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "D": self.dim,
            "kappa": [float(f"{v:.12g}") for v in self.kappa],
            "source": self.source,
        }


def gaussian_reference_cumulants(sigma: float, n: int) -> float:
    """Cumulants of the information variable of a Gaussian with standard deviation ``sigma``."""
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    if n < 1:
        raise ValidationError("cumulant order starts at 1")
    if n == 1:
        return 0.5 * LOG2E + 0.5 * math.log2(2.0 * math.pi * sigma * sigma)
    return 0.5 * LOG2E**n * math.gamma(n)


# ---------------------------------------------------------------------------
# entropy-power towers


def entropy_power_tower(F: SampledDensity, delta: float = DEFAULT_DELTA, count: int = 4) -> list[float]:
    """``[N_{1+k delta} for k in range(count)]`` of ``F``."""
    return [evaluate(F, EntropyIndex(1.0 + k * delta)).power for k in range(count)]


def _tower_values(powers, n_max: int) -> list[float]:
    if isinstance(powers, Mapping):
        missing = [k for k in range(n_max) if k not in powers]
        if missing:
            raise InsufficientTower(f"tower lacks N_(1+k delta) for k = {missing}")
        vals = [powers[k] for k in range(n_max)]
    else:
        vals = list(powers)
        if len(vals) < n_max:
            raise InsufficientTower(f"need {n_max} entropy powers, got {len(vals)}")
        vals = vals[:n_max]
    out = []
    for v in vals:
        v = float(v)
        if not (v > 0 and math.isfinite(v)):
            raise NonFinitePower(f"entropy power {v!r} is not finite and positive")
        out.append(v)
    return out


def cumulants_gldf(
    powers: Union[Sequence[float], Mapping[int, float]], delta: float = DEFAULT_DELTA, dim: int = 1, n_max: int = 3
) -> CumulantSet:
    """Cumulants from a tower of Rényi entropy powers ``N_{1 + k delta}``, ``k = 0 .. n_max-1``.

    ``kappa_n = (n D/2) (log2 e)^n / delta^(n-1) * sum_k (-1)^k C(n-1, k) ln N_{1+k delta}
    + (D/2) (log2 e)^n [(n-1)! + [n = 1] ln 2 pi]``. The differences are
    one-sided, so the bias is first order in ``delta``.
    """
    if not DELTA_RANGE[0] <= delta <= DELTA_RANGE[1]:
        raise OutOfRange(f"delta must lie in [{DELTA_RANGE[0]}, {DELTA_RANGE[1]}], got {delta}")
    if n_max < 2:
        raise ValidationError("n_max must be at least 2")
    logs = [math.log(v) for v in _tower_values(powers, n_max)]
    kappa = []
    for n in range(1, n_max + 1):
        diff = sum((-1) ** k * math.comb(n - 1, k) * logs[k] for k in range(n))
        head = 0.5 * n * dim * LOG2E**n / delta ** (n - 1) * diff
        ref = 0.5 * dim * LOG2E**n * (math.factorial(n - 1) + (math.log(2.0 * math.pi) if n == 1 else 0.0))
        kappa.append(head + ref)
    return CumulantSet(np.array(kappa), delta, dim, "gldf")


def gldf_from_density(
    F: SampledDensity, delta: float = DEFAULT_DELTA, n_max: int = 3, richardson: bool = False
) -> CumulantSet:
    """GLDF cumulants of ``F``; ``richardson`` combines towers at ``delta`` and ``delta/2``."""
    coarse = cumulants_gldf(entropy_power_tower(F, delta, n_max), delta, F.dim, n_max)
    if not richardson:
        return coarse
    fine = cumulants_gldf(entropy_power_tower(F, delta / 2.0, n_max), delta / 2.0, F.dim, n_max)
    return CumulantSet(2.0 * fine.kappa - coarse.kappa, delta, F.dim, "gldf")


# ---------------------------------------------------------------------------
# cumulants from a scan


def moments_to_cumulants(moments: Sequence[float]) -> np.ndarray:
    """Cumulants from raw moments ``[m_1, m_2, ...]`` via the standard recursion."""
    m = [1.0] + [float(v) for v in moments]
    kappa = [0.0]
    for n in range(1, len(m)):
        kappa.append(m[n] - sum(math.comb(n - 1, j - 1) * kappa[j] * m[n - j] for j in range(1, n)))
    return np.array(kappa[1:])


def cumulants_from_scan(scan: InformationScan, n_max: int = 4) -> CumulantSet:
    """Cumulants from moments of ``g`` (central moments, then the recursion)."""
    mean = scan.raw_moment(1)
    central = [0.0] + [scan.raw_moment(k, mean) for k in range(2, n_max + 1)]
    kappa = moments_to_cumulants(central)
    kappa[0] = mean
    return CumulantSet(kappa, scan.bin_width, 1, "scan")


def varentropy(F: SampledDensity) -> float:
    """``kappa_2``: the variance of the information variable, in bits squared."""
    return cumulants_from_scan(information_scan(F), 2)[2]


# ---------------------------------------------------------------------------
# Gram–Charlier A series about the shifted gamma reference


def laguerre(k: int, delta: float, x):
    """Associated Laguerre polynomial ``L_k^(delta)(x)`` by the three-term recurrence."""
    if not 0 <= k <= MAX_LAGUERRE:
        raise OrderUnsupported(f"Laguerre order must lie in [0, {MAX_LAGUERRE}]")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + delta - x
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + delta - x) * cur - (j + delta) * prev) / (j + 1)
    return cur if np.ndim(cur) else float(cur)


@dataclass(frozen=True, eq=False)
class GramCharlierModel:
    a: float
    alpha: float
    beta: float
    corrections: np.ndarray  # kappa_k - gamma_k for k = 2..order
    order: int

    @property
    def exact(self) -> bool:
        """True only when every correction vanishes (the Gaussian case)."""
        return bool(np.all(np.abs(self.corrections) <= 1e-12))

    def reference(self, x):
        """Shifted gamma density ``G(x | a, 1/2, log2 e)``."""
        t = np.asarray(x, dtype=float) - self.a
        out = np.zeros_like(t)
        pos = t > 0
        tp = t[pos]
        out[pos] = tp ** (self.alpha - 1.0) * np.exp(-tp / self.beta) / (math.gamma(self.alpha) * self.beta**self.alpha)
        return out

    def _weights(self) -> dict:
        """Coefficients of ``G^(k)/k!`` in ``exp(sum_k c_k (-D)^k / k!) G`` up to order 4."""
        c = {k: float(v) for k, v in zip(range(2, self.order + 1), self.corrections)}
        weights = {2: c[2]}
        if self.order >= 3:
            weights[3] = -c[3]
        if self.order >= 4:
            weights[4] = c[4] + 3.0 * c[2] ** 2
        return {k: w for k, w in weights.items() if w != 0.0}

    def _series(self, t):
        """Bracket ``1 + sum_k w_k t^-k L_k^(alpha-1-k)(t/beta)`` for ``t > 0``."""
        u = t / self.beta
        out = np.ones_like(t)
        for k, wk in self._weights().items():
            out += wk * t ** (-k) * laguerre(k, self.alpha - 1.0 - k, u)
        return out

    def __call__(self, x):
        """Unclipped series value at ``x``."""
        t = np.asarray(x, dtype=float) - self.a
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = self.reference(x)[pos] * self._series(t[pos])
        return out

    def cumulative(self, x):
        """Integrals of the reference and of the series from the onset up to ``x``.

        The ``k``-th correction is a derivative of ``G``, so its integral is
        ``(w_k/k) t^(1-k) L_(k-1)^(alpha-k)(t/beta) G``. Pointwise the term
        is not integrable at the onset; read as a distribution (which is what
        the expansion is) its integral vanishes there and the total mass stays 1.
        """
        t = np.asarray(x, dtype=float) - self.a
        ref = np.zeros_like(t)
        rec = np.zeros_like(t)
        pos = t > 0
        tp = t[pos]
        u = tp / self.beta
        ref[pos] = gammainc(self.alpha, u)
        G = self.reference(x)[pos]
        acc = ref[pos].copy()
        for k, wk in self._weights().items():
            acc += wk / k * tp ** (1 - k) * laguerre(k - 1, self.alpha - k, u) * G
        rec[pos] = acc
        return ref, rec

    def bin_averages(self, edges: np.ndarray):
        """Bin averages of the reference and of the clipped series, and the clipped mass.

        Averages are exact differences of :meth:`cumulative`; negative bins
        are set to zero and their mass reported.
        """
        edges = np.asarray(edges, dtype=float)
        ref_cum, rec_cum = self.cumulative(edges)
        width = np.diff(edges)
        ref_avg = np.diff(ref_cum) / width
        rec_avg = np.diff(rec_cum) / width
        clipped = np.clip(rec_avg, 0.0, None)
        clipped_mass = float(np.sum((clipped - rec_avg) * width))
        return ref_avg, clipped, clipped_mass


SUPPORTED_ORDERS = (2, 3, 4)


def gram_charlier_model(kappa: CumulantSet, order: int) -> GramCharlierModel:
    if order not in SUPPORTED_ORDERS:
        raise OrderUnsupported(f"Gram–Charlier order must be one of {SUPPORTED_ORDERS}, got {order}")
    if kappa.order < order:
        raise InsufficientTower(f"order {order} needs kappa_1..kappa_{order}")
    alpha, beta = 0.5, LOG2E
    gammas = np.array([alpha * beta**k * math.factorial(k - 1) for k in range(2, order + 1)])
    corr = np.array([kappa[k] for k in range(2, order + 1)]) - gammas
    return GramCharlierModel(kappa[1] - alpha * beta, alpha, beta, corr, order)


@dataclass(frozen=True, eq=False)
class GramCharlierResult:
    x: np.ndarray  # bin centers, bits
    reference: np.ndarray
    reconstructed: np.ndarray
    clipped_mass: float
    model: GramCharlierModel

    def to_csv(self) -> str:
        lines = ["x_bits,g_reference,g_reconstructed"]
        lines += [f"{a:.12g},{b:.12g},{c:.12g}" for a, b, c in zip(self.x, self.reference, self.reconstructed)]
        return "\n".join(lines) + "\n"


def gram_charlier_reconstruct(
    kappa: CumulantSet,
    order: int,
    edges: Optional[np.ndarray] = None,
    bins: int = 1024,
    span: float = 40.0,
) -> GramCharlierResult:
    """Gram–Charlier A reconstruction of ``g`` from ``kappa_1 .. kappa_order``.

    ``g~ = G [1 + c_2 t^-2 L_2 - c_3 t^-3 L_3 + (c_4 + 3 c_2^2) t^-4 L_4]`` with
    ``t = x - a``, ``L_k = L_k^(-1/2-k)(t / log2 e)``, ``c_k = kappa_k - gamma_k``
    and ``a = kappa_1 - log2(e)/2``. Values are bin averages over ``edges``
    (default: ``bins`` bins on ``[a, a + span]``), taken as exact integrals of
    the series read as a distribution. Negative bins are clipped and their
    mass reported. Unless all corrections vanish the result is an
    approximation: a truncated set with nonzero ``c_2`` is never a valid
    cumulant sequence of an exact density.
    """
    model = gram_charlier_model(kappa, order)
    if edges is None:
        edges = model.a + span / bins * np.arange(bins + 1)
    edges = np.asarray(edges, dtype=float)
    ref, rec, clipped = model.bin_averages(edges)
    return GramCharlierResult(0.5 * (edges[:-1] + edges[1:]), ref, rec, clipped, model)
