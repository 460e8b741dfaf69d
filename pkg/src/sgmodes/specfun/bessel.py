"""Spherical Bessel and Hankel functions for large order.

The working regime here is orders up to ~2000 with real or nearly-real
arguments between the two turning points, where naive upward recurrence
for j_l is catastrophically unstable and direct function values can span
hundreds of orders of magnitude.  Three standard tools cover it:

* ``ratio_j``       - logarithmic derivative j'_l/j_l by a modified Lentz
                      continued fraction (Numerical Recipes 3rd ed., ch. 6.7).
                      Never forms j_l itself, so it cannot over/underflow.
* ``sph_bessel_j``  - Miller's downward recurrence, rescaled on the fly and
                      normalized against j_0 = sin(z)/z (or j_1 when j_0 sits
                      near a zero of sin).
* ``sph_hankel``    - upward recurrence from the closed forms of h_0, h_1,
                      which is stable because h^(1)_l is the dominant
                      solution for x below the turning point.

Scaled variants return ``(mantissa, LogReal scale)`` pairs so products like
Wronskians stay finite even when the factors are not representable.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..logreal import LogReal

MAX_ORDER = 2000
_RESCALE = 1e250
_LN_RESCALE = math.log(_RESCALE)


class ConvergenceError(RuntimeError):
    """A continued fraction failed to converge within its iteration cap."""


def _check_order(ell: int) -> int:
    ell = int(ell)
    if ell < 0:
        raise ValueError(f"order must be >= 0, got {ell}")
    if ell > MAX_ORDER:
        raise ValueError(f"order {ell} exceeds the documented working range {MAX_ORDER}")
    return ell


def _start_order(ell: int, az: float) -> int:
    # Miller's method needs to start above the turning point of the largest
    # argument plus a convergence buffer (cf. Mishchenko & Yang stopping rule).
    base = max(ell, az + 4.05 * az ** (1.0 / 3.0) + 8.0)
    return int(base + 8.0 * math.sqrt(base) + 5.0)


# --------------------------------------------------------------------------
# continued fraction for j'_l / j_l
# --------------------------------------------------------------------------

def ratio_j(ell: int, z: complex, tol: float = 1e-15, maxiter: int = 10000) -> complex:
    """Logarithmic derivative j'_l(z)/j_l(z) by modified Lentz evaluation.

    Parameters
    ----------
    ell : int
        Order, 0 <= ell <= 2000.
    z : complex
        Argument, z != 0.
    tol : float
        Relative update below which the fraction is considered converged.
    maxiter : int
        Iteration cap; exceeding it raises ConvergenceError.

    Notes
    -----
    Uses j'_l/j_l = l/z - j_{l+1}(z)/j_l(z) with the ratio evaluated as the
    continued fraction

        j_{l+1}/j_l = 1/((2l+3)/z - 1/((2l+5)/z - ...)),

    which converges to the minimal-solution ratio for any z that is not a
    zero of j_l.  Near such a zero the value diverges and the fraction stops
    converging; that case is reported rather than returned.
    """
    ell = _check_order(ell)
    z = complex(z)
    if z == 0:
        raise ValueError("ratio_j is singular at z = 0")

    tiny = 1e-290
    f = tiny
    c = f
    d = 0.0 + 0.0j
    for k in range(1, maxiter + 1):
        a = 1.0 if k == 1 else -1.0
        b = (2.0 * (ell + k) + 1.0) / z
        d = b + a * d
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < tol:
            return ell / z - f
    raise ConvergenceError(
        f"j-ratio continued fraction did not converge in {maxiter} iterations "
        f"at ell={ell}, z={z!r} (near-zero denominator j_l(z) suspected)"
    )


# --------------------------------------------------------------------------
# spherical Bessel j_l by Miller's downward recurrence
# --------------------------------------------------------------------------

def _j_small_z_scaled(ell: int, z: complex) -> tuple[complex, complex, float]:
    """Power series around z=0; returns (j_m, jp_m, ln_scale)."""
    # j_l(z) = z^l/(2l+1)!! * sum_k (-z^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    s = 1.0 + 0.0j
    sp = 0.0 + 0.0j  # d/dz of the bracket, over z^(l-1) handled below
    term = 1.0 + 0.0j
    z2 = z * z
    for k in range(1, 30):
        term *= -z2 / (2.0 * k * (2.0 * ell + 2.0 * k + 1.0))
        s += term
        sp += term * (2.0 * k)
        if abs(term) < 1e-20 * abs(s):
            break
    # ln scale of z^l/(2l+1)!!
    if z == 0:
        if ell == 0:
            return 1.0 + 0j, 0.0 + 0j, 0.0
        jp = (1.0 / 3.0 + 0j) if ell == 1 else 0.0 + 0j
        return 0.0 + 0j, jp, 0.0
    ln_dfact = math.lgamma(2 * ell + 2) - ell * math.log(2.0) - math.lgamma(ell + 1)
    ln_scale = ell * math.log(abs(z)) - ln_dfact
    phase = cmath.exp(1j * ell * cmath.phase(z))
    j_m = phase * s
    # j'_l = d/dz [z^l b(z)]/(2l+1)!! = z^(l-1) (l b + z b') / (2l+1)!!
    jp_m = phase / z * (ell * s + sp)
    return j_m, jp_m, ln_scale


def sph_bessel_j_scaled(ell: int, z: complex) -> tuple[complex, complex, LogReal]:
    """(mantissa j, mantissa j', scale) with j_l(z) = mantissa * exp(scale).

    The scale is shared by the value and the derivative.  Useful where the
    function itself underflows (deep below the turning point) but products
    with Hankel functions are O(1).
    """
    ell = _check_order(ell)
    z = complex(z)
    az = abs(z)
    if az < 0.5:
        j_m, jp_m, ln = _j_small_z_scaled(ell, z)
        return j_m, jp_m, LogReal.from_ln(1, ln)

    if ell == 0:
        j0 = cmath.sin(z) / z
        j0p = cmath.cos(z) / z - cmath.sin(z) / (z * z)
        return j0, j0p, LogReal.from_ln(1, 0.0)

    nstart = _start_order(ell, az)
    p_up = 0.0 + 0.0j   # p_{n+1}
    p = 1e-30 + 0.0j    # p_n at n = nstart
    resc_ln = 0.0
    cap = cap_m1 = 0.0 + 0.0j
    cap_resc = capm1_resc = 0.0
    for n in range(nstart, 0, -1):
        p_dn = (2.0 * n + 1.0) / z * p - p_up
        p_up, p = p, p_dn
        m = abs(p)
        if m > _RESCALE:
            p /= m
            p_up /= m
            resc_ln += math.log(m)
        if n - 1 == ell:
            cap, cap_resc = p, resc_ln
        elif n - 1 == ell - 1:
            cap_m1, capm1_resc = p, resc_ln
    # now p = raw j_0, p_up = raw j_1, both carrying e^{resc_ln}
    j0_true = cmath.sin(z) / z
    j1_true = cmath.sin(z) / (z * z) - cmath.cos(z) / z
    if abs(j0_true) >= abs(j1_true):
        anchor_true, anchor_raw = j0_true, p
    else:
        anchor_true, anchor_raw = j1_true, p_up
    if anchor_raw == 0:
        raise ConvergenceError(f"downward recurrence lost normalization at ell={ell}, z={z!r}")
    norm = anchor_true / anchor_raw
    # mantissas referenced to the capture point so the shared scale is <= 0
    scale_ln = cap_resc - resc_ln
    j_m = cap * norm
    # raise j_{l-1} to the j_l capture scale before applying norm: the raw
    # ratio j_{l-1}/j_l is bounded by ~(2l+1)/|z|, so this cannot overflow
    jm1 = (cap_m1 * math.exp(capm1_resc - cap_resc)) * norm
    jp_m = jm1 - (ell + 1.0) / z * j_m
    return j_m, jp_m, LogReal.from_ln(1, scale_ln)


def sph_bessel_j(ell: int, z: complex, derivative: bool = False):
    """Spherical Bessel j_l(z) (and optionally j'_l) as plain complex values.

    Accurate to >= 10 significant digits for |z| <= 2000 with
    |Im z| / |Re z| <= 1e-3, away from zeros of j_l.  Values whose magnitude
    falls below the subnormal range underflow to 0.0; use
    ``sph_bessel_j_scaled`` when that matters.
    """
    j_m, jp_m, scale = sph_bessel_j_scaled(ell, z)
    s = math.exp(scale.ln_abs) if scale.ln_abs > -745.0 else 0.0
    j = j_m * s
    jp = jp_m * s
    return (j, jp) if derivative else j


def sph_jn_array(ell: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized j_l and j'_l over an array of arguments (single order l).

    Same downward recurrence as the scalar path, run across the whole array
    at once; intended for radial field profiles.  Entries with |z| < 0.5 go
    through the power series.
    """
    ell = _check_order(ell)
    z = np.asarray(z, dtype=complex)
    out_j = np.zeros(z.shape, dtype=complex)
    out_jp = np.zeros(z.shape, dtype=complex)
    small = np.abs(z) < 0.5
    if small.any():
        for idx in np.argwhere(small):
            i = tuple(idx)
            jm, jpm, ln = _j_small_z_scaled(ell, complex(z[i]))
            s = math.exp(ln) if ln > -745.0 else 0.0
            out_j[i] = jm * s
            out_jp[i] = jpm * s
    big = ~small
    if not big.any():
        return out_j, out_jp
    zb = z[big]
    nstart = _start_order(ell, float(np.abs(zb).max()))
    p_up = np.zeros(zb.shape, dtype=complex)
    p = np.full(zb.shape, 1e-30, dtype=complex)
    resc = np.zeros(zb.shape)
    capj = np.zeros(zb.shape, dtype=complex)
    capm1 = np.zeros(zb.shape, dtype=complex)
    cap_resc = np.zeros(zb.shape)
    capm1_resc = np.zeros(zb.shape)
    inv_z = 1.0 / zb
    for n in range(nstart, 0, -1):
        p_dn = (2.0 * n + 1.0) * inv_z * p - p_up
        p_up, p = p, p_dn
        m = np.abs(p)
        mask = m > _RESCALE
        if mask.any():
            p[mask] /= m[mask]
            p_up[mask] /= m[mask]
            resc[mask] += np.log(m[mask])
        if n - 1 == ell:
            capj[:] = p
            cap_resc[:] = resc
        elif n - 1 == ell - 1:
            capm1[:] = p
            capm1_resc[:] = resc
    j0 = np.sin(zb) * inv_z
    j1 = np.sin(zb) * inv_z * inv_z - np.cos(zb) * inv_z
    use0 = np.abs(j0) >= np.abs(j1)
    anchor_true = np.where(use0, j0, j1)
    anchor_raw = np.where(use0, p, p_up)
    norm = anchor_true / anchor_raw
    if ell == 0:
        jb = j0
        jpb = np.cos(zb) * inv_z - np.sin(zb) * inv_z * inv_z
    else:
        ln_j = cap_resc - resc
        ln_m1 = capm1_resc - resc
        jb = capj * norm * np.exp(np.clip(ln_j, -745.0, 0.0))
        jm1 = capm1 * norm * np.exp(np.clip(ln_m1, -745.0, 0.0))
        jpb = jm1 - (ell + 1.0) * inv_z * jb
    out_j[big] = jb
    out_jp[big] = jpb
    return out_j, out_jp


def sph_jn_ratio_array(ell: int, z: np.ndarray) -> np.ndarray:
    """j'_l/j_l over an array of arguments via the downward ratio chain.

    Cheaper than per-point Lentz fractions for dense wavelength grids; the
    scalar ``ratio_j`` remains the precision reference.
    """
    ell = _check_order(ell)
    z = np.asarray(z, dtype=complex)
    nstart = _start_order(ell, float(np.abs(z).max()))
    inv_z = 1.0 / z
    # rho_n = j_n / j_{n-1}; iterate rho downward from a zero seed
    rho = np.zeros(z.shape, dtype=complex)
    for n in range(nstart, ell, -1):
        rho = 1.0 / ((2.0 * n + 1.0) * inv_z - rho)
    # at exit rho = j_{ell+1}/j_ell
    return ell * inv_z - rho


# --------------------------------------------------------------------------
# spherical Hankel by upward recurrence
# --------------------------------------------------------------------------

def _hankel1_raw(ell: int, x: float) -> tuple[complex, complex, float]:
    """(h_(l-1) mantissa, h_l mantissa, ln rescale) by upward recurrence."""
    if x <= 0:
        raise ValueError(f"sph_hankel requires x > 0, got {x}")
    e = cmath.exp(1j * x) / x
    hm1 = e                    # h_{-1}(x) = e^{ix}/x
    h0 = -1j * e               # h_0
    resc_ln = 0.0
    if ell == 0:
        return hm1, h0, resc_ln
    prev, cur = hm1, h0
    for n in range(0, ell):
        nxt = (2.0 * n + 1.0) / x * cur - prev
        prev, cur = cur, nxt
        m = abs(cur)
        if m > _RESCALE:
            cur /= m
            prev /= m
            resc_ln += math.log(m)
    return prev, cur, resc_ln


def sph_hankel1_scaled(ell: int, x: float) -> tuple[complex, complex, LogReal]:
    """(mantissa h, mantissa h', scale) with h^(1)_l(x) = mantissa*exp(scale)."""
    ell = _check_order(ell)
    prev, cur, resc_ln = _hankel1_raw(ell, float(x))
    hp = prev - (ell + 1.0) / x * cur
    return cur, hp, LogReal.from_ln(1, resc_ln)


def sph_hankel(kind: int, ell: int, x: float, derivative: bool = False):
    """Spherical Hankel h^(kind)_l(x) for real x > 0.

    kind 2 is computed by conjugation of kind 1 (exact on the real axis).
    Raises OverflowError instead of returning infinities when the value
    exceeds the double range (the magnitude reaches ~1e113 by l=700 at
    x near the turning point, which still fits; much larger orders at small
    x do not).
    """
    if kind not in (1, 2):
        raise ValueError(f"kind must be 1 or 2, got {kind}")
    h_m, hp_m, scale = sph_hankel1_scaled(ell, x)
    for name, m in (("h", h_m), ("h'", hp_m)):
        if scale.ln_abs + math.log(max(abs(m), 1e-300)) > 709.0:
            raise OverflowError(
                f"{name}_{ell}({x}) magnitude exceeds the representable range"
            )
    s = math.exp(scale.ln_abs)
    h = h_m * s
    hp = hp_m * s
    if kind == 2:
        h = h.conjugate()
        hp = hp.conjugate()
    return (h, hp) if derivative else h


def hankel1_ratio(ell: int, x: float) -> complex:
    """h^(1)'_l(x) / h^(1)_l(x); rescaling keeps it finite for any order."""
    ell = _check_order(ell)
    prev, cur, _ = _hankel1_raw(ell, float(x))
    return prev / cur - (ell + 1.0) / x


def hankel1_ratio_array(ell: int, x: np.ndarray) -> np.ndarray:
    """Vectorized h^(1)'_l/h^(1)_l over an array of real arguments."""
    ell = _check_order(ell)
    x = np.asarray(x, dtype=float)
    if (x <= 0).any():
        raise ValueError("hankel1_ratio_array requires x > 0")
    e = np.exp(1j * x) / x
    prev = e
    cur = -1j * e
    for n in range(0, ell):
        nxt = (2.0 * n + 1.0) / x * cur - prev
        prev, cur = cur, nxt
        m = np.abs(cur)
        mask = m > _RESCALE
        if mask.any():
            cur[mask] /= m[mask]
            prev[mask] /= m[mask]
    return prev / cur - (ell + 1.0) / x
