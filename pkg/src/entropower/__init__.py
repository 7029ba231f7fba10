"""Rényi entropy powers, entropy-power uncertainty relations and information scans."""

__version__ = "0.1.0"

from .errors import EntropowerError, NumericalError, ValidationError
from .grid import (
    Grid1D,
    SampledAmplitude,
    SampledDensity,
    density_from_amplitude,
    integrate,
    lp_norm,
    normalize,
)
from .renyi import INFINITY, EntropyIndex, entropy_power, holder_conjugate, renyi_entropy, shannon_entropy
from .transform import beckner_rescale, fourier_conjugate, inverse_fourier
from .repur import conjugate_index, repur_product, repur_sweep, vur_chain
from .infoscan import equimeasurable, information_scan, laplace_consistency, onset_point
from .cumulants import (
    cumulants_from_scan,
    cumulants_gldf,
    gaussian_reference_cumulants,
    gram_charlier_reconstruct,
    laguerre,
    varentropy,
)
from .tails import classify_tail, fit_power_tail, fit_stretched_tail
from .states import bessel_k0, cauchy_pltwp, gaussian_state, squeezed_superposition, synthetic_tail_density

__all__ = [
    "EntropowerError",
    "NumericalError",
    "ValidationError",
    "Grid1D",
    "SampledAmplitude",
    "SampledDensity",
    "density_from_amplitude",
    "integrate",
    "lp_norm",
    "normalize",
    "INFINITY",
    "EntropyIndex",
    "entropy_power",
    "holder_conjugate",
    "renyi_entropy",
    "shannon_entropy",
    "beckner_rescale",
    "fourier_conjugate",
    "inverse_fourier",
    "conjugate_index",
    "repur_product",
    "repur_sweep",
    "vur_chain",
    "equimeasurable",
    "information_scan",
    "laplace_consistency",
    "onset_point",
    "cumulants_from_scan",
    "cumulants_gldf",
    "gaussian_reference_cumulants",
    "gram_charlier_reconstruct",
    "laguerre",
    "varentropy",
    "classify_tail",
    "fit_power_tail",
    "fit_stretched_tail",
    "bessel_k0",
    "cauchy_pltwp",
    "gaussian_state",
    "squeezed_superposition",
    "synthetic_tail_density",
]
