"""Numerically stable special functions for large-order surface-mode work.

Spherical Bessel and Hankel functions at orders up to ~2000, logarithmic
derivative ratios that never form the functions themselves, Debye
asymptotics, and overflow-safe associated Legendre kernels.
"""

from .bessel import (
    ConvergenceError,
    hankel1_ratio,
    hankel1_ratio_array,
    ratio_j,
    sph_bessel_j,
    sph_bessel_j_scaled,
    sph_hankel,
    sph_hankel1_scaled,
    sph_jn_array,
    sph_jn_ratio_array,
)
from .debye import DebyeAngles, DebyeEval, debye_angles, debye_eval
from .legendre import AngularKernels, angular_kernels, ln_norm_factor, norm_kernels

__all__ = [
    "AngularKernels",
    "ConvergenceError",
    "DebyeAngles",
    "DebyeEval",
    "angular_kernels",
    "debye_angles",
    "debye_eval",
    "hankel1_ratio",
    "hankel1_ratio_array",
    "ln_norm_factor",
    "norm_kernels",
    "ratio_j",
    "sph_bessel_j",
    "sph_bessel_j_scaled",
    "sph_hankel",
    "sph_hankel1_scaled",
    "sph_jn_array",
    "sph_jn_ratio_array",
]
