"""Associated Legendre kernels for high degree.

Everything runs on the orthonormalized functions

    Nbar_l^m(theta) = b_lm P_l^m(cos theta),
    b_lm = sqrt((2l+1)(l-m)! / (4 pi (l+m)!)),

computed with the standard fully-normalized three-term recurrence, which is
stable to degrees of a few thousand.  Raw P_l^m values overflow doubles
already around l=150 for m close to l (P_350^345 is ~1e818), so the raw
variant is available only where representable and raises otherwise.

Condon-Shortley phase throughout: P_1^1(cos theta) = -sin(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LN_4PI = math.log(4.0 * math.pi)


@dataclass(frozen=True)
class AngularKernels:
    """P_l^m(cos theta) and the two theta-functions m*P/sin and dP/dtheta."""

    ell: int
    m: int
    theta: float
    p: float
    t1: float
    t2: float
    normalized: bool


def ln_norm_factor(ell: int, m: int) -> float:
    """ln b_lm for the orthonormal spherical-harmonic normalization."""
    return 0.5 * (
        math.log(2.0 * ell + 1.0)
        - _LN_4PI
        + math.lgamma(ell - m + 1.0)
        - math.lgamma(ell + m + 1.0)
    )


def _validate(ell: int, m: int, theta) -> None:
    if ell < 0 or abs(m) > ell:
        raise ValueError(f"need 0 <= |m| <= ell, got ell={ell}, m={m}")
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0.0) or np.any(th >= math.pi):
        raise ValueError("theta must lie strictly inside (0, pi)")


def norm_kernels(ell: int, m: int, theta):
    """Normalized kernels (Nbar, m*Nbar/sin(theta), dNbar/dtheta).

    ``theta`` may be a scalar or an array; outputs follow its shape.
    Negative m uses Nbar_l^{-m} = (-1)^m Nbar_l^m.
    """
    _validate(ell, m, theta)
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)

    ma = abs(m)
    ct = np.cos(th)
    st = np.sin(th)

    # seed Nbar_m^m = (-1)^m sqrt((2m+1)!! / (4 pi (2m)!!)) sin^m(theta),
    # built multiplicatively so large m underflows gracefully instead of
    # overflowing a factorial
    p = np.full(th.shape, math.sqrt(1.0 / (4.0 * math.pi)))
    for k in range(1, ma + 1):
        p = -p * math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * st
    p_prev = np.zeros(th.shape)

    for l in range(ma + 1, ell + 1):
        a = math.sqrt((4.0 * l * l - 1.0) / (l * l - ma * ma))
        b = math.sqrt(((l - 1.0) ** 2 - ma * ma) / (4.0 * (l - 1.0) ** 2 - 1.0))
        p_new = a * (ct * p - b * p_prev)
        p_prev, p = p, p_new

    if ell == ma:
        dp = ma * ct / st * p
    else:
        c = math.sqrt((2.0 * ell + 1.0) * (ell * ell - ma * ma) / (2.0 * ell - 1.0))
        dp = (ell * ct * p - c * p_prev) / st

    if m < 0 and ma % 2 == 1:
        p = -p
        dp = -dp
    t1 = m * p / st
    t2 = dp
    if scalar:
        return float(p[0]), float(t1[0]), float(t2[0])
    return p, t1, t2


def angular_kernels(ell: int, m: int, theta: float, normalized: bool = False) -> AngularKernels:
    """Kernels at one angle, raw Legendre convention by default.

    Raw values carry the 1/b_lm factor and exceed the double range already
    for moderately large (ell, m); in that case an OverflowError points to
    the normalized variant, which every downstream physics formula uses
    anyway (the b_lm^2 factors cancel in ratios or fold into the |a_0|^2
    normalization).
    """
    p, t1, t2 = norm_kernels(ell, m, float(theta))
    if normalized:
        return AngularKernels(ell, m, float(theta), p, t1, t2, True)
    ln_inv_b = -ln_norm_factor(ell, abs(m))
    vals = []
    for v in (p, t1, t2):
        if v == 0.0:
            vals.append(0.0)
            continue
        ln_mag = math.log(abs(v)) + ln_inv_b
        if ln_mag > 709.0:
            raise OverflowError(
                f"raw P_{ell}^{m} kernels exceed the double range "
                f"(|value| ~ 1e{ln_mag / math.log(10):.0f}); request normalized=True"
            )
        vals.append(math.copysign(math.exp(ln_mag), v))
    return AngularKernels(ell, m, float(theta), vals[0], vals[1], vals[2], False)
