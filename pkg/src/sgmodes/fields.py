"""Field-profile diagnostics for surface modes.

Time-averaged energy density and Poynting vector of one (pol, ell, m)
multipole, the angle Theta between the Poynting vector and the local
tangent plane, solid-angle averages, vector spherical harmonics, and the
WGM / WGM' / SGM-candidate classification of a given interior size
parameter zeta.

All angular dependence enters through the orthonormalized Legendre kernels
(b_lm folded in, see specfun.legendre); the resulting densities therefore
carry a factor b_lm^2 relative to raw-Legendre conventions, which is
absorbed into the free overall amplitude |a0|^2 and cancels identically in
Theta and in every normalized export.

Field normalization note: the radial component of a multipole field carries
the factor l(l+1) relative to the tangential components (the standard N/M
vector structure, e.g. Jackson eq. 9.122 or the Bohren-Huffman N-vector).
The pointwise densities here use that Maxwell-consistent weighting, which
is also the only one whose solid-angle quadrature reproduces the closed
form of ``avg_energy_density`` exactly; popular restatements that scale the
radial component like the tangential ones change the pointwise profile
depths (but not the positions of its minima) and break that identity by
O(l^2).

Radial conventions: r in um, k in 1/nm, so kr and z = k n r are formed with
the nm-per-um factor once, here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .medium import NM_PER_UM, ComplexIndex
from .scattering import check_pol
from .specfun.bessel import ratio_j, sph_bessel_j, sph_jn_array
from .specfun.legendre import norm_kernels

# CODATA 2018
EPSILON_0 = 8.8541878128e-12   # F/m
MU_0 = 1.25663706212e-6        # N/A^2
Z_0 = 376.730313668            # Ohm
C_0 = 299792458.0              # m/s

CLASSIFY_RTOL = 1e-6


@dataclass(frozen=True)
class PoyntingSample:
    s_r: float
    s_theta: float
    s_phi: float
    theta_angle: float
    normal_incidence: bool = False


@dataclass(frozen=True)
class VshTriple:
    """Y, Psi, Phi at one direction, as (r^, theta^, phi^) components."""

    ell: int
    y: np.ndarray
    psi: np.ndarray
    phi: np.ndarray

    @property
    def x(self) -> np.ndarray:
        """The transverse harmonic X = -i Phi / sqrt(l(l+1))."""
        return -1j * self.phi / math.sqrt(self.ell * (self.ell + 1.0))


def _as_n(n_tilde: ComplexIndex | complex) -> complex:
    if isinstance(n_tilde, ComplexIndex):
        return n_tilde.as_complex()
    return complex(n_tilde)


def _interior_radial(ell: int, r_um: float, k_per_nm: float, n: complex):
    """(|j(z)|^2, z*jr(z), kr) for the interior radial factor a0 j(k n r)."""
    if r_um <= 0:
        raise ValueError(f"r must be > 0, got {r_um}")
    kr = k_per_nm * r_um * NM_PER_UM
    z = n * kr
    j = sph_bessel_j(ell, z)
    jr = ratio_j(ell, z)
    return abs(j) ** 2, z * jr, kr


def _density_core(pol, ell, m, thetas, absj2, zjr, kr, n, a0_abs):
    """Shared assembly of (u, S_r, S_theta, S_phi, Theta) over theta values.

    Built so the kernel ratios never divide by zero: the products
    T2(theta)*T0^2 = T1*P and T3(theta)*T0^2 = T2*P appear instead of the
    ratios themselves.
    """
    ll1 = ell * (ell + 1.0)
    p, t1, t2 = norm_kernels(ell, m, thetas)
    t0sq = t1 * t1 + t2 * t2
    bracket = abs(zjr + 1.0) ** 2
    if pol == "te":
        u = 0.25 * EPSILON_0 * a0_abs**2 * absj2 / ll1 * (
            t0sq * (n.real**2 - n.imag**2 + bracket / kr**2)
            + ll1 * ll1 * p * p / kr**2
        )
        base = a0_abs**2 * absj2 / (2.0 * Z_0 * kr)
        s_r = base * t0sq * zjr.imag / ll1
        s_th = np.zeros_like(np.asarray(u))
        s_ph = base * t1 * p
    else:
        n2 = n * n
        w = (1.0 / n2).real
        u = 0.25 * MU_0 * a0_abs**2 * absj2 / ll1 * (
            t0sq * (1.0 + w * bracket / kr**2) + w * ll1 * ll1 * p * p / kr**2
        )
        base = Z_0 * a0_abs**2 * absj2 / (2.0 * kr * abs(n2) ** 2)
        s_r = base * t0sq * (n2.conjugate() * (zjr + 1.0)).imag / ll1
        s_th = base * (t2 * p) * n2.imag
        s_ph = base * (t1 * p) * n2.real
    return u, s_r, s_th, s_ph


def energy_density(
    pol: str,
    ell: int,
    m: int,
    r_um: float,
    theta: float,
    k_per_nm: float,
    n_tilde: ComplexIndex | complex,
    a0_abs: float = 1.0,
) -> float:
    """Time-averaged energy density of the interior field at (r, theta).

    TE modes weight the angular kernels by eps0 Re(n^2), TM by mu0 with the
    radial bracket scaled by Re(1/n^2).
    """
    pol = check_pol(pol)
    n = _as_n(n_tilde)
    absj2, zjr, kr = _interior_radial(ell, r_um, k_per_nm, n)
    u, *_ = _density_core(pol, ell, m, float(theta), absj2, zjr, kr, n, a0_abs)
    return float(u)


def poynting_and_theta(
    pol: str,
    ell: int,
    m: int,
    r_um: float,
    theta: float,
    k_per_nm: float,
    n_tilde: ComplexIndex | complex,
    a0_abs: float = 1.0,
) -> PoyntingSample:
    """Time-averaged Poynting components and the tangent-plane angle Theta.

    Theta = arctan[ S.(-r^) / (S.theta^ + S.phi^) ]; where the tangential
    flow vanishes (m = 0, or kernel zeros) the sample is flagged
    normal_incidence and Theta is +-pi/2 by the sign of -S_r.
    """
    pol = check_pol(pol)
    n = _as_n(n_tilde)
    absj2, zjr, kr = _interior_radial(ell, r_um, k_per_nm, n)
    _, s_r, s_th, s_ph = _density_core(pol, ell, m, float(theta), absj2, zjr, kr, n, a0_abs)
    s_r, s_th, s_ph = float(s_r), float(s_th), float(s_ph)
    num = -s_r
    den = s_th + s_ph
    if den == 0.0:
        ang = math.copysign(math.pi / 2.0, num) if num != 0.0 else 0.0
        return PoyntingSample(s_r, s_th, s_ph, ang, normal_incidence=True)
    return PoyntingSample(s_r, s_th, s_ph, math.atan(num / den), False)


def theta_profile(
    pol: str,
    ell: int,
    m: int,
    r_um: float,
    thetas: np.ndarray,
    k_per_nm: float,
    n_tilde: ComplexIndex | complex,
    a0_abs: float = 1.0,
):
    """Vectorized (u, S_r, S_theta, S_phi, Theta) over a theta grid."""
    pol = check_pol(pol)
    n = _as_n(n_tilde)
    thetas = np.asarray(thetas, dtype=float)
    absj2, zjr, kr = _interior_radial(ell, r_um, k_per_nm, n)
    u, s_r, s_th, s_ph = _density_core(pol, ell, m, thetas, absj2, zjr, kr, n, a0_abs)
    s_r = np.broadcast_to(s_r, u.shape)
    num = -s_r
    den = s_th + s_ph
    ang = np.where(den != 0.0, np.arctan(np.divide(num, den, where=den != 0.0)),
                   np.where(num != 0.0, np.copysign(np.pi / 2.0, num), 0.0))
    return u, s_r, s_th, s_ph, ang


def avg_energy_density(
    pol: str,
    ell: int,
    r_um: float,
    k_per_nm: float,
    n_tilde: ComplexIndex | complex,
    a0_abs: float = 1.0,
) -> float:
    """Solid-angle average of the energy density at radius r (closed form)."""
    pol = check_pol(pol)
    n = _as_n(n_tilde)
    absj2, zjr, kr = _interior_radial(ell, r_um, k_per_nm, n)
    bracket = abs(zjr + 1.0) ** 2 + ell * (ell + 1.0)
    if pol == "te":
        return (
            EPSILON_0 * a0_abs**2 * absj2 / (16.0 * math.pi)
            * (n.real**2 - n.imag**2 + bracket / kr**2)
        )
    re_inv_n2 = (1.0 / (n * n)).real
    return (
        MU_0 * a0_abs**2 * absj2 / (16.0 * math.pi)
        * (1.0 + re_inv_n2 * bracket / kr**2)
    )


def f_bar_plus(ell: int, zeta: np.ndarray) -> np.ndarray:
    """Leading-order radial envelope [j' + j/z]^2 + (1 + l(l+1)/z^2) j^2."""
    zeta = np.asarray(zeta, dtype=float)
    j, jp = sph_jn_array(ell, zeta.astype(complex))
    j, jp = j.real, jp.real
    return (jp + j / zeta) ** 2 + (1.0 + ell * (ell + 1.0) / zeta**2) * j * j


def f_pm(ell: int, zeta: float, u: float, v: float) -> float:
    """General [j' + u j/z]^2 + (1 + v/z^2) j^2 with free (u, v)."""
    j, jp = sph_bessel_j(ell, complex(zeta), derivative=True)
    j, jp = j.real, jp.real
    return (jp + u * j / zeta) ** 2 + (1.0 + v / zeta**2) * j * j


def avg_energy_leading(
    pol: str, ell: int, zeta: np.ndarray, eta: float, a0_abs: float = 1.0
) -> np.ndarray:
    """Leading-order (kappa -> 0) solid-angle average as a function of zeta."""
    pol = check_pol(pol)
    fb = f_bar_plus(ell, zeta)
    if pol == "te":
        return EPSILON_0 * a0_abs**2 * eta**2 * fb / (16.0 * math.pi)
    return MU_0 * a0_abs**2 * fb / (16.0 * math.pi)


def radial_average_profile(
    pol: str,
    ell: int,
    r_um: np.ndarray,
    k_per_nm: float,
    n_tilde: ComplexIndex | complex,
    a0_abs: float = 1.0,
) -> np.ndarray:
    """Vectorized closed-form average over a radial grid (interior)."""
    pol = check_pol(pol)
    n = _as_n(n_tilde)
    r_um = np.asarray(r_um, dtype=float)
    if np.any(r_um <= 0):
        raise ValueError("radial grid must be strictly positive")
    kr = k_per_nm * r_um * NM_PER_UM
    z = n * kr
    j, jp = sph_jn_array(ell, z)
    absj2 = np.abs(j) ** 2
    safe_j = np.where(j != 0, j, 1.0)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        zjr = np.where(j != 0, z * jp / safe_j, 0.0)
        zjr = np.where(np.isfinite(zjr), zjr, 0.0)
    bracket = np.abs(zjr + 1.0) ** 2 + ell * (ell + 1.0)
    if pol == "te":
        out = EPSILON_0 * a0_abs**2 * absj2 / (16.0 * math.pi) * (
            n.real**2 - n.imag**2 + bracket / kr**2
        )
    else:
        re_inv_n2 = (1.0 / (n * n)).real
        out = MU_0 * a0_abs**2 * absj2 / (16.0 * math.pi) * (
            1.0 + re_inv_n2 * bracket / kr**2
        )
    # where j underflowed to zero the density is zero anyway
    return np.where(absj2 > 0, out, 0.0)


# ------------------------------------------------------------ profile tools

def strict_local_minima(values: np.ndarray) -> np.ndarray:
    """Indices of strict interior local minima of a sampled profile."""
    v = np.asarray(values, dtype=float)
    return np.nonzero((v[1:-1] < v[:-2]) & (v[1:-1] < v[2:]))[0] + 1


def strict_local_maxima(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]))[0] + 1


def refine_minimum(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section refinement of a bracketed minimum."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# --------------------------------------------------- vector spherical harm.

def vsh(ell: int, m: int, theta: float, phi: float) -> VshTriple:
    """Orthonormal vector spherical harmonics (Y, Psi, Phi) at one direction.

    Components are in the (r^, theta^, phi^) basis.  X_lm is recovered as
    -i Phi / sqrt(l(l+1)).
    """
    p, t1, t2 = norm_kernels(ell, m, theta)
    ph = complex(math.cos(m * phi), math.sin(m * phi))
    y = np.array([p * ph, 0.0, 0.0], dtype=complex)
    psi = np.array([0.0, t2 * ph, 1j * t1 * ph], dtype=complex)
    phi_vec = np.array([0.0, -1j * t1 * ph, t2 * ph], dtype=complex)
    return VshTriple(ell, y, psi, phi_vec)


# ------------------------------------------------------------ classification

def _real_j(ell: int, z: np.ndarray) -> np.ndarray:
    j, _ = sph_jn_array(ell, np.asarray(z, dtype=complex))
    return j.real


def _real_jp(ell: int, z: np.ndarray) -> np.ndarray:
    _, jp = sph_jn_array(ell, np.asarray(z, dtype=complex))
    return jp.real


def _zeros_near(fn, ell: int, center: float, half_width: float, step: float) -> list[float]:
    lo = max(center - half_width, 1e-6)
    grid = np.arange(lo, center + half_width, step)
    if grid.size < 2:
        return []
    vals = fn(ell, grid)
    zeros = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(vals[i])
        for _ in range(80):
            midp = 0.5 * (a + b)
            fm = float(fn(ell, np.array([midp]))[0])
            if fa * fm <= 0:
                b = midp
            else:
                a, fa = midp, fm
        zeros.append(0.5 * (a + b))
    return zeros


def jl_zeros_near(ell: int, center: float, half_width: float = 4.0) -> list[float]:
    return _zeros_near(_real_j, ell, center, half_width, 0.05)


def jlp_zeros_near(ell: int, center: float, half_width: float = 4.0) -> list[float]:
    return _zeros_near(_real_jp, ell, center, half_width, 0.05)


def classify_mode(
    ell: int,
    zeta: float,
    eta: float | None = None,
    pol: str = "te",
    records=None,
    rtol: float = CLASSIFY_RTOL,
) -> str:
    """WGM (zero of j_l), WGMprime (zero of j'_l), SGM-candidate, or none.

    SGM matching needs the singular-gallery roots, which depend on eta;
    supply ``eta`` (or precomputed ``records``) to enable it.
    """
    if zeta <= 0:
        raise ValueError(f"zeta must be > 0, got {zeta}")
    tol = rtol * zeta
    nu = ell + 0.5
    if zeta > nu - 2.0:  # oscillatory region only; j has no zeros below nu
        for z0 in jl_zeros_near(ell, zeta):
            if abs(z0 - zeta) <= tol:
                return "WGM"
        for z0 in jlp_zeros_near(ell, zeta):
            if abs(z0 - zeta) <= tol:
                return "WGMprime"
    sgm_zetas: list[float] = []
    if records is not None:
        sgm_zetas = [r.zeta for r in records if r.ell == ell]
    elif eta is not None and nu < zeta < nu * eta:
        from .sgm_asymptotic import sgm_zeta_roots

        sgm_zetas = sgm_zeta_roots(pol, ell, eta)
    for z0 in sgm_zetas:
        if abs(z0 - zeta) <= tol:
            return "SGM-candidate"
    return "none"


# ------------------------------------------------- leading-order Theta forms

def theta_leading(
    pol: str,
    ell: int,
    m: int,
    theta: float,
    zeta: float,
    eta: float,
    kappa: float,
) -> float:
    """Small-kappa tangent-angle approximations.

    TE uses the F- envelope form; TM uses the Debye-phase form (only valid
    above the turning point zeta > ell + 1/2).  Exported for comparison with
    the exact Theta of ``poynting_and_theta``.
    """
    pol = check_pol(pol)
    p, t1, t2 = norm_kernels(ell, m, theta)
    t0sq = t1 * t1 + t2 * t2
    st = math.sin(theta)
    tau2 = m * st * p * p / (st * st * t2 * t2 + m * m * p * p)
    if tau2 == 0.0:
        return math.copysign(math.pi / 2.0, -kappa)
    ll1 = ell * (ell + 1.0)
    if pol == "te":
        j, jp = sph_bessel_j(ell, complex(zeta), derivative=True)
        j, jp = j.real, jp.real
        f_minus = (jp + 0.5 * j / zeta) ** 2 + (1.0 - (ell + 0.5) ** 2 / zeta**2) * j * j
        return math.atan(kappa * zeta**2 * f_minus / (eta * tau2 * j * j * ll1))
    nu = ell + 0.5
    if zeta <= nu:
        raise ValueError("TM leading form needs zeta above the turning point")
    alpha = math.acos(nu / zeta)
    phi = nu * (math.tan(alpha) - alpha) - math.pi / 4.0
    t = math.tan(phi)
    return math.atan(
        kappa / (eta * tau2 * ll1) * ((zeta * t + 1.0) ** 2 + zeta**2 - nu**2)
    )
