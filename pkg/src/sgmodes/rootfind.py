"""Exact-equation refinement and dispersive singularity solving.

Two Newton solvers on the exact (non-asymptotic) singularity residual:

* ``refine_exact``     - fixed real index eta; unknowns (zeta, kappa).
* ``solve_dispersive`` - two-level dispersive medium; unknowns (lambda, g0),
                         with (eta, kappa) supplied by the linearized
                         dispersion model at every iterate.

Both use a two-real-unknown Newton iteration on (Re residual, Im residual)
with a finite-difference Jacobian.  A complex-analytic Newton would be
wrong for the dispersive case: (eta(lambda), kappa(lambda)) enter through
real rational functions, so the residual is not holomorphic in lambda.

Floating-point resolution guard: the imaginary balance that fixes kappa has
magnitude ~|kappa| * zeta * O(1).  When that falls below ~1e-13 the exact
residual cannot see the gain at all in double precision (most of the mode
table: |kappa| down to 1e-222), so refinement is skipped with an explicit
status instead of reporting a fake confirmation.  Those modes are validated
through the asymptotic path only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .logreal import LogReal
from .medium import (
    CM_PER_NM,
    DEFAULT_BAND,
    NM_PER_UM,
    GainMaterial,
    dispersive_index,
    f2,
    gain_from_kappa,
)
from .scattering import SolverError, check_pol, residual
from .sgm_asymptotic import SingularityRecord, enumerate_sgm

RESOLUTION_FLOOR = 1e-13
REFINE_TOL = 1e-9
REFINE_MAX_ITER = 50
DISPERSIVE_MAX_ITER = 60
DEDUP_LAMBDA_NM = 1e-4

STATUS_CONVERGED = "converged"
STATUS_SKIPPED_RESOLUTION = "kappa_below_float_resolution"
STATUS_FAILED = "failed"
STATUS_BAND_EXCLUDED = "band_excluded"


@dataclass(frozen=True)
class RefineResult:
    record: SingularityRecord
    status: str
    dzeta_rel: float
    dkappa_rel: float
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class DispersiveSingularity:
    pol: str
    ell: int
    lambda_nm: float
    g0_per_cm: float
    eta_at_lambda: float
    kappa_at_lambda: LogReal
    residual_norm: float
    status: str
    seed_q: int = 0


@dataclass(frozen=True)
class DispersiveResult:
    records: tuple[DispersiveSingularity, ...]
    seed_statuses: tuple[tuple[int, str], ...]  # (q, status) per attempted seed


def _imag_signal(seed: SingularityRecord, eta: float) -> float:
    """Magnitude of the kappa-driven imaginary part of the exact residual.

    Equals |kappa| * zeta * (local condition factor); comparing it against
    RESOLUTION_FLOOR decides whether double precision can resolve the gain.
    """
    nu = seed.ell + 0.5
    zeta = seed.zeta
    x = zeta / eta
    beta = math.acosh(nu / x)
    psi = nu * (math.tanh(beta) - beta)
    ln = math.log(4.0) + 2.0 * psi - math.log(math.exp(4.0 * psi) + 4.0)
    ln += math.log(math.sinh(beta))
    return math.exp(ln) if ln > -700 else 0.0


def _solve_2x2(j11, j12, j21, j22, r1, r2):
    det = j11 * j22 - j12 * j21
    if det == 0.0 or not math.isfinite(det):
        raise SolverError("singular Jacobian in Newton step")
    return (r1 * j22 - r2 * j12) / det, (j11 * r2 - j21 * r1) / det


def refine_exact(
    seed: SingularityRecord,
    a_um: float,
    eta: float,
    tol: float = REFINE_TOL,
    max_iter: int = REFINE_MAX_ITER,
) -> RefineResult:
    """Polish an asymptotic record against the exact residual.

    Newton on (zeta, kappa) at fixed eta.  Returns the refined record with
    ``method="exact"``, or the seed unchanged with an explanatory status
    when the gain is below float resolution or the iteration fails.
    """
    check_pol(seed.pol)
    kappa0 = seed.kappa.to_float()
    if kappa0 == 0.0 or _imag_signal(seed, eta) < RESOLUTION_FLOOR:
        return RefineResult(seed, STATUS_SKIPPED_RESOLUTION, 0.0, 0.0, math.nan, 0)

    zeta, kappa = seed.zeta, kappa0
    res = complex(math.nan)
    for it in range(max_iter):
        res = residual(seed.pol, seed.ell, zeta / eta, complex(eta, kappa))
        if abs(res) <= tol:
            break
        dz = 1e-7 * zeta
        dk = 1e-4 * abs(kappa)
        rz = residual(seed.pol, seed.ell, (zeta + dz) / eta, complex(eta, kappa))
        rk = residual(seed.pol, seed.ell, zeta / eta, complex(eta, kappa + dk))
        try:
            step_z, step_k = _solve_2x2(
                (rz.real - res.real) / dz, (rk.real - res.real) / dk,
                (rz.imag - res.imag) / dz, (rk.imag - res.imag) / dk,
                -res.real, -res.imag,
            )
        except SolverError:
            return RefineResult(seed, STATUS_FAILED, 0.0, 0.0, abs(res), it)
        # keep steps inside one tan-branch spacing so Newton cannot hop modes
        limit = 0.5
        if abs(step_z) > limit:
            scale = limit / abs(step_z)
            step_z *= scale
            step_k *= scale
        zeta += step_z
        kappa += step_k
    else:
        refined = replace(seed, method="exact", flags=seed.flags + ("refine-failed",))
        return RefineResult(refined, STATUS_FAILED, 0.0, 0.0, abs(res), max_iter)

    lam = 2.0 * math.pi * a_um * NM_PER_UM * eta / zeta
    kap = LogReal.from_float(kappa)
    refined = replace(
        seed,
        zeta=zeta,
        lambda_nm=lam,
        kappa=kap,
        gain_per_cm=gain_from_kappa(lam, kap),
        method="exact",
    )
    return RefineResult(
        refined,
        STATUS_CONVERGED,
        abs(zeta - seed.zeta) / seed.zeta,
        abs(kappa - kappa0) / abs(kappa0),
        abs(res),
        it + 1,
    )


# ------------------------------------------------------------- dispersive

def _dispersive_residual(
    pol: str, ell: int, a_um: float, material: GainMaterial,
    lambda_nm: float, g0: float, band: tuple[float, float],
) -> complex:
    idx = dispersive_index(material, lambda_nm, g0, band)
    x = 2.0 * math.pi * a_um * NM_PER_UM / lambda_nm
    return residual(pol, ell, x, idx.as_complex())


def solve_dispersive(
    pol: str,
    ell: int,
    a_um: float,
    material: GainMaterial,
    band: tuple[float, float] = DEFAULT_BAND,
    seeds: Sequence[SingularityRecord] | None = None,
    tol: float = REFINE_TOL,
    max_iter: int = DISPERSIVE_MAX_ITER,
    dedup_nm: float = DEDUP_LAMBDA_NM,
) -> DispersiveResult:
    """All resolvable spectral singularities of (pol, ell) in the (lambda, g0) plane.

    Seeds default to the fixed-index asymptotic enumeration at eta = n0.
    Each seed inside the dispersion band maps to an initial (lambda, g0)
    through kappa = kappa0 f2(lambda0/lambda) and is polished by Newton on
    the exact residual.  Converged solutions are deduplicated by wavelength
    and sorted; per-seed failures are collected, not fatal.
    """
    pol = check_pol(pol)
    if seeds is None:
        seeds = enumerate_sgm(pol, ell, a_um, material.n0)
    lam_lo = band[0] * material.lambda0_nm
    lam_hi = band[1] * material.lambda0_nm

    found: list[DispersiveSingularity] = []
    statuses: list[tuple[int, str]] = []
    for seed in seeds:
        if not lam_lo <= seed.lambda_nm <= lam_hi:
            statuses.append((seed.q, STATUS_BAND_EXCLUDED))
            continue
        kappa_seed = seed.kappa.to_float()
        if kappa_seed == 0.0 or _imag_signal(seed, material.n0) < RESOLUTION_FLOOR:
            statuses.append((seed.q, STATUS_SKIPPED_RESOLUTION))
            continue
        w = material.lambda0_nm / seed.lambda_nm
        kappa0 = kappa_seed / f2(w, material.gamma_hat)
        g0 = -4.0 * math.pi * kappa0 / (material.lambda0_nm * CM_PER_NM)
        if g0 <= 0:
            statuses.append((seed.q, STATUS_FAILED))
            continue
        lam = seed.lambda_nm
        ok = False
        res = complex(math.nan)
        for it in range(max_iter):
            try:
                res = _dispersive_residual(pol, ell, a_um, material, lam, g0, band)
            except ValueError:
                break  # stepped out of the dispersion band
            if abs(res) <= tol:
                ok = True
                break
            dl = 1e-6 * lam
            dg = 1e-4 * g0
            try:
                rl = _dispersive_residual(pol, ell, a_um, material, lam + dl, g0, band)
                rg = _dispersive_residual(pol, ell, a_um, material, lam, g0 + dg, band)
                step_l, step_g = _solve_2x2(
                    (rl.real - res.real) / dl, (rg.real - res.real) / dg,
                    (rl.imag - res.imag) / dl, (rg.imag - res.imag) / dg,
                    -res.real, -res.imag,
                )
            except (ValueError, SolverError):
                break
            # damp wavelength jumps to well under the inter-mode spacing
            if abs(step_l) > 1.0:
                scale = 1.0 / abs(step_l)
                step_l *= scale
                step_g *= scale
            lam += step_l
            g0 += step_g
            if g0 <= 0:
                g0 = abs(g0) * 0.5 + 1e-15
        if not ok:
            statuses.append((seed.q, STATUS_FAILED))
            continue
        idx = dispersive_index(material, lam, g0, band)
        found.append(
            DispersiveSingularity(
                pol, ell, lam, g0, idx.eta, idx.kappa, abs(res),
                STATUS_CONVERGED, seed_q=seed.q,
            )
        )
        statuses.append((seed.q, STATUS_CONVERGED))

    found.sort(key=lambda r: r.lambda_nm)
    deduped: list[DispersiveSingularity] = []
    for rec in found:
        if deduped and abs(rec.lambda_nm - deduped[-1].lambda_nm) < dedup_nm:
            if rec.residual_norm < deduped[-1].residual_norm:
                deduped[-1] = rec
            continue
        deduped.append(rec)
    return DispersiveResult(tuple(deduped), tuple(statuses))


def equal_gain_groups(
    records: Sequence[DispersiveSingularity], rel_tol: float = 0.01
) -> list[list[DispersiveSingularity]]:
    """Greedy clustering by g0: a record joins the current group while every
    member stays within ``rel_tol`` of the running group mean."""
    if not records:
        return []
    ordered = sorted(records, key=lambda r: r.g0_per_cm)
    groups: list[list[DispersiveSingularity]] = [[ordered[0]]]
    for rec in ordered[1:]:
        cand = groups[-1] + [rec]
        mean = sum(r.g0_per_cm for r in cand) / len(cand)
        lo, hi = cand[0].g0_per_cm, cand[-1].g0_per_cm
        if mean > 0 and (mean - lo) / mean <= rel_tol and (hi - mean) / mean <= rel_tol:
            groups[-1] = cand
        else:
            groups.append([rec])
    return groups


def real_part_zero_contour(
    pol: str,
    ell: int,
    a_um: float,
    material: GainMaterial,
    lambda_lo_nm: float,
    lambda_hi_nm: float,
    n_lambda: int,
    g0_values: Sequence[float],
    band: tuple[float, float] = DEFAULT_BAND,
) -> list[tuple[float, float]]:
    """(lambda, g0) points where Re(exact residual) crosses zero.

    Diagnostic companion dataset to the singularity dots: the dots satisfy
    both the real and imaginary conditions, the contour only the real one.
    """
    import numpy as np

    from .scattering import residual_array

    pol = check_pol(pol)
    lam = np.linspace(lambda_lo_nm, lambda_hi_nm, n_lambda)
    pts: list[tuple[float, float]] = []
    for g0 in g0_values:
        n_arr = np.array(
            [dispersive_index(material, w, g0, band).as_complex() for w in lam]
        )
        x_arr = 2.0 * math.pi * a_um * NM_PER_UM / lam
        re = np.real(residual_array(pol, ell, x_arr, n_arr))
        for i in np.nonzero(np.sign(re[:-1]) * np.sign(re[1:]) < 0)[0]:
            lo, hi = float(lam[i]), float(lam[i + 1])
            flo = re[i]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = _dispersive_residual(pol, ell, a_um, material, mid, g0, band).real
                if flo * fm <= 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            pts.append((0.5 * (lo + hi), g0))
    pts.sort(key=lambda t: (t[1], t[0]))
    return pts
