"""Modified Bessel function K0, vectorized, without scipy.special.

Small arguments (u <= 2) use the ascending series

    K0(u) = -(ln(u/2) + euler_gamma) I0(u) + sum_k (u^2/4)^k / (k!)^2 H_k

and larger arguments use Steed's evaluation of Temme's continued fraction
for K_nu at nu = 0, whose leading behaviour is the familiar
``exp(-u) sqrt(pi/2u)`` asymptote.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = ["bessel_k0"]

EULER_GAMMA = 0.57721566490153286061
SERIES_CUTOFF = 2.0
_SERIES_TERMS = 30
_CF_MAXIT = 500
_CF_EPS = 1e-16


def _k0_series(u: np.ndarray) -> np.ndarray:
    q = 0.25 * u * u
    term = np.ones_like(u)
    i0 = np.ones_like(u)
    acc = np.zeros_like(u)
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        acc += term * harmonic
    return -(np.log(0.5 * u) + EULER_GAMMA) * i0 + acc


def _k0_continued_fraction(x: np.ndarray) -> np.ndarray:
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    for i in range(2, _CF_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = np.where(active, s + dels, s)
        active &= np.abs(dels / s) >= _CF_EPS
        if not active.any():
            break
    return np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) / s


def bessel_k0(u):
    """K0(u) for u > 0; scalar in, scalar out, array in, array out.

    Raises :class:`DomainError` for any ``u <= 0``.
    """
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("K0 is defined for u > 0 only")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_CUTOFF
    if small.any():
        out[small] = _k0_series(flat[small])
    if (~small).any():
        out[~small] = _k0_continued_fraction(flat[~small])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)
