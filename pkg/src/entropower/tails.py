"""Tail-class recovery from the information PDF ``g``.

Far from the onset ``g`` inherits the tail of ``F``:

* power law ``F ~ C |y|^-(1+alpha)``:
  ``g(x) = (ln 2/(1+alpha)) (C_+^(1/(1+alpha)) + C_-^(1/(1+alpha))) 2^(-alpha x/(1+alpha))``
* stretched exponential ``F ~ D 2^(-beta |y|^a)``:
  ``g(x) = 2^-x / (a beta^(1/a)) [(x + log2 D_+)^(1/a-1) + (x + log2 D_-)^(1/a-1)]``

Only the sums over the two sides are visible in ``g``, so both fits assume
symmetric tails (``C_+ = C_-``, ``D_+ = D_-``). Fits are least squares on
``log2 g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import DegenerateFit, InsufficientTail, NoConvergence
from .infoscan import InformationScan

__all__ = [
    "TailFit",
    "fit_power_tail",
    "fit_stretched_tail",
    "classify_tail",
    "auto_window",
    "MIN_WINDOW_BINS",
    "CLEARANCE_BITS",
]

LN2 = math.log(2.0)
MIN_WINDOW_BINS = 10
MIN_TAIL_BINS = 30
CLEARANCE_BITS = 5.0
UPPER_FRACTION = 0.30
AMBIGUITY_MARGIN = 0.10
MAX_EVALUATIONS = 200


@dataclass(frozen=True)
class TailFit:
    model: str  # "power_law" | "stretched"
    params: dict
    window: tuple
    residual: float
    ambiguous: bool = False
    alternatives: dict = field(default_factory=dict)  # residuals of the rejected model(s)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": {k: float(f"{v:.12g}") for k, v in self.params.items()},
            "window": [float(f"{w:.12g}") for w in self.window],
            "residual": float(f"{self.residual:.12g}"),
            "ambiguous": self.ambiguous,
        }


def _window_data(scan: InformationScan, window: Sequence[float]):
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise InsufficientTail("window must have x_hi > x_lo")
    x = scan.x
    sel = (x >= lo) & (x <= hi) & (scan.g > 0)
    sel[-1] = False  # overflow bin
    if int(sel.sum()) < MIN_WINDOW_BINS:
        raise InsufficientTail(f"window [{lo:g}, {hi:g}] holds fewer than {MIN_WINDOW_BINS} populated bins")
    return x[sel], np.log2(scan.g[sel])


def fit_power_tail(scan: InformationScan, window: Sequence[float]) -> TailFit:
    """Power-law tail: slope ``s`` of ``log2 g`` gives ``alpha = -s/(1+s)``."""
    x, y = _window_data(scan, window)
    (s, b), res, *_ = np.polyfit(x, y, 1, full=True)
    if not -2.0 / 3.0 < s < 0.0:
        raise DegenerateFit(f"slope {s:.4g} lies outside (-2/3, 0); not a power-law tail with alpha in (0, 2)")
    s, b = float(s), float(b)
    alpha = -s / (1.0 + s)
    c_sum = 2.0**b * (1.0 + alpha) / LN2
    c = (c_sum / 2.0) ** (1.0 + alpha)
    rms = math.sqrt(float(res[0]) / x.size) if res.size else 0.0
    return TailFit("power_law", {"alpha": alpha, "c": c, "c_sum": c_sum, "slope": s}, (float(window[0]), float(window[1])), rms)


def _stretched_model(theta, x):
    a, log2_beta, d = theta
    return -x + 1.0 - math.log2(a) - log2_beta / a + (1.0 / a - 1.0) * np.log2(x + d)


def fit_stretched_tail(scan: InformationScan, window: Sequence[float]) -> TailFit:
    """Stretched-exponential tail fitted for ``(a, beta, log2 D)`` by nonlinear least squares."""
    x, y = _window_data(scan, window)
    lx = np.log2(x - scan.onset)
    k0 = np.polyfit(lx, y + x, 1)[0]
    a0 = min(max(1.0 / (1.0 + k0), 0.05), 20.0) if k0 > -1.0 else 20.0
    d0 = -scan.onset
    # beta from the mean offset at (a0, d0)
    base = -x + 1.0 - math.log2(a0) + (1.0 / a0 - 1.0) * np.log2(x + d0)
    log2_beta0 = float(np.mean(base - y)) * a0
    d_floor = -float(x.min()) + 1e-6
    theta0 = np.array([a0, log2_beta0, max(d0, d_floor + 1e-3)])
    try:
        sol = least_squares(
            lambda th: _stretched_model(th, x) - y,
            theta0,
            bounds=([1e-3, -np.inf, d_floor], [50.0, np.inf, np.inf]),
            max_nfev=MAX_EVALUATIONS,
            x_scale="jac",
        )
    except ValueError as exc:
        raise NoConvergence(f"stretched fit failed: {exc}") from None
    if sol.status <= 0:
        raise NoConvergence(f"stretched fit did not converge in {MAX_EVALUATIONS} evaluations")
    a, log2_beta, d = (float(v) for v in sol.x)
    rms = math.sqrt(float(np.mean(sol.fun**2)))
    return TailFit(
        "stretched",
        {"a": a, "beta": 2.0**log2_beta, "d": 2.0**d, "log2_d": d},
        (float(window[0]), float(window[1])),
        rms,
    )


def auto_window(scan: InformationScan, clearance: float = CLEARANCE_BITS) -> tuple:
    """Upper 30% of populated bins, at least ``clearance`` bits past the onset.

    The overflow bin and the two outermost populated bins (partially filled
    where the sampled density ends) are excluded.
    """
    g = scan.g[:-1]
    populated = np.nonzero(g > 0)[0]
    if populated.size == 0:
        raise InsufficientTail("scan has no populated bins")
    last = int(populated[-1]) - 2
    x = scan.x[:-1]
    start_x = scan.onset + clearance
    beyond = (np.arange(g.size) <= last) & (x >= start_x) & (g > 0)
    if int(beyond.sum()) < MIN_TAIL_BINS:
        raise InsufficientTail(f"fewer than {MIN_TAIL_BINS} populated bins beyond onset + {clearance:g} bits")
    first = int(populated[0])
    lo_idx = max(first + int(round((1.0 - UPPER_FRACTION) * (last - first))), int(np.argmax(x >= start_x)))
    if last - lo_idx + 1 < MIN_WINDOW_BINS:
        raise InsufficientTail("auto window is too narrow")
    return float(x[lo_idx]), float(x[last])


def classify_tail(
    scan: InformationScan, window: Optional[Sequence[float]] = None, clearance: float = CLEARANCE_BITS
) -> TailFit:
    """Fit both tail families and keep the one with the smaller residual.

    The choice is flagged ``ambiguous`` when the residuals differ by less
    than 10%.
    """
    win = tuple(window) if window is not None else auto_window(scan, clearance)
    fits = {}
    errors = {}
    for name, fitter in (("power_law", fit_power_tail), ("stretched", fit_stretched_tail)):
        try:
            fits[name] = fitter(scan, win)
        except (DegenerateFit, NoConvergence) as exc:
            errors[name] = exc
    if not fits:
        raise DegenerateFit("; ".join(str(e) for e in errors.values()))
    best = min(fits.values(), key=lambda f: f.residual)
    others = {k: f.residual for k, f in fits.items() if f is not best}
    ambiguous = False
    for r in others.values():
        top = max(r, best.residual)
        if top == 0.0 or (r - best.residual) / top < AMBIGUITY_MARGIN:
            ambiguous = True
    return TailFit(best.model, best.params, best.window, best.residual, ambiguous, others)
