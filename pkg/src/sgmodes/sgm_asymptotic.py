"""Large-order asymptotic solver for singular gallery modes.

For ell >> 1 the exact TE/TM singularity conditions reduce, through the
Debye expansions of the Bessel/Hankel ratios, to a pair of real equations
in (zeta, kappa) per mode.  With

    P(zeta) = (1 - 4 e^{-4 psi}) / (1 + 4 e^{-4 psi})    (in (-1, -3/5))

the real parts read

    TE:  P sinh(beta) - eta tan(phi)                          = 0
    TM:  P sinh(beta) - tan(phi)/eta - (eta^2 - 1)/(2 eta zeta) = 0

and each root fixes kappa linearly through the imaginary part:

    TE:  kappa = -C sinh(beta) / [zeta (sec^2 phi - cos^2 alpha)]
    TM:  kappa = -C sinh(beta) / [(zeta/eta^2)((tan phi + 1/zeta)^2
                   + 1 - (nu^2 + 2)/zeta^2) + 2/(zeta eta^2)]

with C = 4 e^{-2 psi} / (1 + 4 e^{-4 psi}), evaluated in the log domain
because e^{-2 psi} spans hundreds of decades across a single ell.

Root isolation is exact rather than heuristic: phi(zeta) increases
monotonically, tan(phi) sweeps (-inf, inf) once per branch between
consecutive poles phi = (n + 1/2) pi, and the remaining terms vary slowly,
so every branch interior to the window nu < zeta < nu*eta contains exactly
one root.  Counting branches therefore counts modes, which is what makes
the q_max values trustworthy.

Note the sign of the TM correction term: the opposite sign, which a naive
derivation through the same Debye forms produces, displaces every root by
about +2.5e-3 in zeta; the form used here is the one consistent with the
exact-equation refinement and with the published mode tables this solver
is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .logreal import LogReal
from .medium import NM_PER_UM, gain_from_kappa
from .scattering import SolverError, check_pol

# relative inset of the solver window from the turning points
WINDOW_DELTA = 1e-6
# records closer than this fraction of the window span to either edge are
# flagged: the leading-order expansion degrades toward the turning points
NEAR_EDGE_FRACTION = 0.01
# spec'd root polish: bisection to this absolute width, then Newton steps
BISECT_WIDTH = 1e-10
NEWTON_STEPS = 2
NEWTON_FD_STEP = 1e-6

MIN_ASYMPTOTIC_ELL = 50


@dataclass(frozen=True)
class SingularityRecord:
    """One located spectral singularity of a surface mode."""

    pol: str
    ell: int
    q: int
    zeta: float
    lambda_nm: float
    kappa: LogReal
    gain_per_cm: LogReal
    method: str = "asymptotic"
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SgmSummary:
    pol: str
    ell: int
    q_max: int
    lambda_min_nm: float
    lambda_max_nm: float
    g_min_per_cm: LogReal


def _angles(nu: float, eta: float, zeta: float):
    x = zeta / eta
    alpha = math.acos(nu / zeta)
    phi = nu * (math.tan(alpha) - alpha) - math.pi / 4.0
    beta = math.acosh(nu / x)
    psi = nu * (math.tanh(beta) - beta)
    return alpha, phi, beta, psi


def _pref(psi: float) -> float:
    # (1 - 4 e^{-4 psi}) / (1 + 4 e^{-4 psi}), written to saturate cleanly
    # at -1 for psi << 0 instead of overflowing
    e4 = math.exp(4.0 * psi)  # <= 1
    return (e4 - 4.0) / (e4 + 4.0)


def real_residual(pol: str, ell: int, eta: float, zeta: float) -> float:
    """Real part of the asymptotic singularity condition at real kappa -> 0."""
    pol = check_pol(pol)
    nu = ell + 0.5
    if not nu < zeta < nu * eta:
        raise ValueError(
            f"zeta = {zeta} outside the surface-mode window ({nu}, {nu * eta})"
        )
    alpha, phi, beta, psi = _angles(nu, eta, zeta)
    base = _pref(psi) * math.sinh(beta)
    if pol == "te":
        return base - eta * math.tan(phi)
    return base - math.tan(phi) / eta - (eta * eta - 1.0) / (2.0 * eta * zeta)


def kappa_of_root(pol: str, ell: int, eta: float, zeta_root: float) -> LogReal:
    """kappa of the imaginary-part balance at a real-part root, in log form."""
    pol = check_pol(pol)
    nu = ell + 0.5
    alpha, phi, beta, psi = _angles(nu, eta, zeta_root)
    # ln of 4 e^{-2 psi} / (1 + 4 e^{-4 psi}), stable for any psi <= 0
    ln_c = math.log(4.0) + 2.0 * psi - math.log(math.exp(4.0 * psi) + 4.0)
    t = math.tan(phi)
    if pol == "te":
        denom = zeta_root * (1.0 + t * t - (nu / zeta_root) ** 2)
    else:
        denom = (zeta_root / eta**2) * (
            (t + 1.0 / zeta_root) ** 2 + 1.0 - (nu * nu + 2.0) / zeta_root**2
        ) + 2.0 / (zeta_root * eta**2)
    if denom <= 0.0:
        raise SolverError(
            f"kappa denominator non-positive at ({pol}, ell={ell}, zeta={zeta_root}): "
            "computed kappa would be non-negative (absorption, not gain)"
        )
    ln_kappa = ln_c + math.log(math.sinh(beta)) - math.log(denom)
    return LogReal.from_ln(-1, ln_kappa)


# ------------------------------------------------------------------ rooting

def _phi(nu: float, zeta: float) -> float:
    alpha = math.acos(nu / zeta)
    return nu * (math.tan(alpha) - alpha) - math.pi / 4.0


def _solve_phi_equals(nu: float, target: float, lo: float, hi: float) -> float:
    # phi is monotone increasing in zeta; plain bisection
    flo = _phi(nu, lo) - target
    fhi = _phi(nu, hi) - target
    if flo > 0 or fhi < 0:
        raise SolverError("branch-point bracket lost monotonicity")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _phi(nu, mid) - target <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bisect_then_newton(f, lo: float, hi: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise SolverError("root bracket does not straddle a sign change")
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    root = 0.5 * (lo + hi)
    for _ in range(NEWTON_STEPS):
        d = (f(root + NEWTON_FD_STEP) - f(root - NEWTON_FD_STEP)) / (2.0 * NEWTON_FD_STEP)
        if d == 0.0:
            break
        step = f(root) / d
        cand = root - step
        if not lo - 1.0 <= cand <= hi + 1.0:
            break
        root = cand
    return root


def sgm_zeta_roots(pol: str, ell: int, eta: float, delta: float = WINDOW_DELTA) -> list[float]:
    """All real-part roots in the window, ordered; q is the 1-based index."""
    pol = check_pol(pol)
    nu = ell + 0.5
    if eta <= 1.0:
        raise ValueError(f"eta must exceed 1 for a surface-mode window, got {eta}")
    zlo = nu * (1.0 + delta)
    zhi = nu * eta * (1.0 - delta)
    phi_lo, phi_hi = _phi(nu, zlo), _phi(nu, zhi)
    n0 = math.ceil(phi_lo / math.pi - 0.5)
    n1 = math.floor(phi_hi / math.pi - 0.5)
    branch_points = [
        _solve_phi_equals(nu, (n + 0.5) * math.pi, zlo, zhi) for n in range(n0, n1 + 1)
    ]
    edges = [zlo, *branch_points, zhi]

    def f(z: float) -> float:
        return real_residual(pol, ell, eta, z)

    roots: list[float] = []
    eps = 1e-9
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        aa = a + eps * abs(a)
        bb = b - eps * abs(b)
        if aa >= bb:
            continue
        fa, fb = f(aa), f(bb)
        interior = 0 < i < len(edges) - 2
        if fa * fb < 0:
            roots.append(_bisect_then_newton(f, aa, bb))
        elif interior:
            # every full branch must hold exactly one root; a missing sign
            # change means the bracketing logic no longer matches the
            # function and continuing would silently drop modes
            raise SolverError(
                f"no sign change in full tan-branch [{aa:.6f}, {bb:.6f}] at "
                f"({pol}, ell={ell}, eta={eta}): f(a)={fa:.3e}, f(b)={fb:.3e}"
            )
    return roots


def enumerate_sgm(
    pol: str,
    ell: int,
    a_um: float,
    eta: float,
    delta: float = WINDOW_DELTA,
) -> list[SingularityRecord]:
    """Every singular gallery mode of (pol, ell) for a sphere of radius a.

    Records are ordered by increasing zeta and labeled q = 1, 2, ...;
    len(records) is q_max.
    """
    pol = check_pol(pol)
    if ell < MIN_ASYMPTOTIC_ELL:
        raise ValueError(
            f"asymptotic enumeration needs ell >= {MIN_ASYMPTOTIC_ELL}, got {ell}"
        )
    if a_um <= 0:
        raise ValueError(f"radius must be positive, got {a_um}")
    nu = ell + 0.5
    span = nu * (eta - 1.0)
    records = []
    for q, zeta in enumerate(sgm_zeta_roots(pol, ell, eta, delta), start=1):
        lam = 2.0 * math.pi * a_um * NM_PER_UM * eta / zeta
        kappa = kappa_of_root(pol, ell, eta, zeta)
        gain = gain_from_kappa(lam, kappa)
        flags = []
        if min(zeta - nu, nu * eta - zeta) < NEAR_EDGE_FRACTION * span:
            flags.append("near-edge")
        records.append(
            SingularityRecord(
                pol, ell, q, zeta, lam, kappa, gain, "asymptotic", tuple(flags)
            )
        )
    return records


def summarize(records: list[SingularityRecord]) -> SgmSummary:
    if not records:
        raise ValueError("cannot summarize an empty record list")
    pol, ell = records[0].pol, records[0].ell
    lam = [r.lambda_nm for r in records]
    g_min = min((r.gain_per_cm for r in records), key=lambda g: g.ln_abs)
    return SgmSummary(pol, ell, len(records), min(lam), max(lam), g_min)
