"""Debye asymptotic expansions of cylindrical Bessel/Hankel functions.

Leading-order large-order forms valid away from the turning points: the
oscillatory region zeta > nu for J_nu, and the evanescent region x < nu for
H^(1)_nu (Abramowitz & Stegun 9.3.7 and 9.3.15 families).  The Hankel values
are returned as (complex mantissa, LogReal scale) pairs because exp(-psi)
alone spans roughly 1e0..1e222 over the orders of interest here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..logreal import LogReal


@dataclass(frozen=True)
class DebyeAngles:
    """The four Debye variables for order nu at arguments (x, zeta)."""

    alpha: float  # arccos(nu/zeta), in (0, pi/2)
    phi: float    # nu*(tan(alpha) - alpha) - pi/4
    beta: float   # arccosh(nu/x), > 0
    psi: float    # nu*(tanh(beta) - beta), < 0


@dataclass(frozen=True)
class DebyeEval:
    angles: DebyeAngles
    j: float                       # J_nu(zeta), leading order
    jp: float                      # J'_nu(zeta), leading order
    h1: tuple[complex, LogReal]    # H1_nu(x) as mantissa * exp(scale)
    h1p: tuple[complex, LogReal]   # H1'_nu(x), same scale convention


def debye_angles(nu: float, x: float, zeta: float) -> DebyeAngles:
    if not zeta > nu:
        raise ValueError(f"Debye oscillatory branch needs zeta > nu (zeta={zeta}, nu={nu})")
    if not 0 < x < nu:
        raise ValueError(f"Debye evanescent branch needs 0 < x < nu (x={x}, nu={nu})")
    alpha = math.acos(nu / zeta)
    phi = nu * (math.tan(alpha) - alpha) - math.pi / 4.0
    beta = math.acosh(nu / x)
    psi = nu * (math.tanh(beta) - beta)
    return DebyeAngles(alpha, phi, beta, psi)


def debye_eval(nu: float, x: float, zeta: float) -> DebyeEval:
    """Leading-order Debye values of J_nu(zeta), J'_nu(zeta), H1_nu(x), H1'_nu(x).

    Relative accuracy is O(1/nu) measured against the oscillation envelope;
    the pointwise relative error of J and J' blows up at their zeros, as for
    any phase-amplitude approximation.

    The derivative J'_nu carries the factor -sin(alpha) of the standard
    expansion (A&S 9.3.19-9.3.20); several restatements in the literature
    drop it, which an exact-function oracle immediately contradicts.
    """
    ang = debye_angles(nu, x, zeta)
    amp = math.sqrt(2.0 / (math.pi * nu * math.tan(ang.alpha)))
    j = amp * math.cos(ang.phi)
    jp = -amp * math.sin(ang.alpha) * math.sin(ang.phi)

    # H1 = e^psi - 2i e^-psi over sqrt(2 pi nu tanh beta); factor the
    # dominant e^-psi out so the mantissa never overflows for psi << 0
    scale = LogReal.from_ln(1, -ang.psi)
    e2psi = math.exp(2.0 * ang.psi)  # <= 1
    h_norm = math.sqrt(2.0 * math.pi * nu * math.tanh(ang.beta))
    h1_m = (e2psi - 2.0j) / h_norm
    h1p_m = (e2psi + 2.0j) * math.sqrt(math.sinh(2.0 * ang.beta) / (4.0 * math.pi * nu))
    return DebyeEval(ang, j, jp, (h1_m, scale), (h1p_m, scale))
