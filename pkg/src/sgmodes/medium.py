"""Refractive-index models for the gain medium.

A fixed complex index n = eta + i*kappa (kappa < 0 means gain), conversions
between kappa and the gain coefficient g = -4 pi kappa / lambda, and the
linearized two-level dispersion model

    eta(w)   ~ n0 + kappa0 f1(w),      f1(w) = g^ (1 - w^2) / D(w),
    kappa(w) ~ kappa0 f2(w),           f2(w) = g^2 w / D(w),
    D(w)     = (1 - w^2)^2 + g^2 w^2,  w = lambda0/lambda,

with kappa0 = -lambda0 g0 / (4 pi) the index perturbation at resonance.

Unit policy (applies package-wide): lengths cross API boundaries in nm,
gain coefficients in 1/cm, sphere radii in um.  All conversions live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .logreal import LogReal

NM_PER_UM = 1000.0
CM_PER_NM = 1.0e-7
_LN_CM_PER_NM = math.log(CM_PER_NM)
_LN_4PI = math.log(4.0 * math.pi)

# |kappa| << 1 < eta is the regime every formula in this package assumes
KAPPA_LIMIT = 0.1


@dataclass(frozen=True)
class ComplexIndex:
    """Complex refractive index eta + i*kappa with kappa kept in signed-log form.

    kappa.sign == -1 marks a gain medium.  eta == 1 (vacuum) is accepted for
    reference checks even though the physical regime of interest is eta > 1.
    """

    eta: float
    kappa: LogReal

    def __post_init__(self) -> None:
        if not self.eta >= 1.0:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if self.kappa.sign != 0 and self.kappa.ln_abs >= math.log(KAPPA_LIMIT):
            raise ValueError(
                f"|kappa| = {self.kappa.sci_string()} outside the |kappa| << 1 regime"
            )

    @classmethod
    def from_parts(cls, eta: float, kappa: float) -> "ComplexIndex":
        return cls(float(eta), LogReal.from_float(kappa))

    def as_complex(self) -> complex:
        """Nearest plain complex; |kappa| below ~1e-308 underflows to 0."""
        return complex(self.eta, self.kappa.to_float())

    @property
    def is_gain(self) -> bool:
        return self.kappa.sign == -1


@dataclass(frozen=True)
class GainMaterial:
    """Two-level dispersion parameters of a doped host medium."""

    n0: float
    lambda0_nm: float
    gamma_hat: float
    g0_max_per_cm: float

    def __post_init__(self) -> None:
        if not self.n0 > 1.0:
            raise ValueError(f"n0 must be > 1, got {self.n0}")
        if not 0.0 < self.gamma_hat < 1.0:
            raise ValueError(f"gamma_hat must be in (0, 1), got {self.gamma_hat}")
        if not self.lambda0_nm > 0.0:
            raise ValueError(f"lambda0_nm must be > 0, got {self.lambda0_nm}")


NDYAG = GainMaterial(n0=1.8217, lambda0_nm=808.0, gamma_hat=0.003094, g0_max_per_cm=0.359)

_PRESETS = {"ndyag": NDYAG}

# default trust band of the linearized model, as fractions of lambda0
DEFAULT_BAND = (0.4, 2.0)


# --------------------------------------------------------------------- gains

def kappa_from_gain(lambda_nm: float, g_per_cm: LogReal | float) -> LogReal:
    """kappa = -lambda*g/(4 pi), lambda in nm, g in 1/cm."""
    if not lambda_nm > 0:
        raise ValueError(f"lambda must be > 0, got {lambda_nm}")
    g = g_per_cm if isinstance(g_per_cm, LogReal) else LogReal.from_float(g_per_cm)
    if g.sign == 0:
        return LogReal.zero()
    ln = g.ln_abs + math.log(lambda_nm) + _LN_CM_PER_NM - _LN_4PI
    return LogReal.from_ln(-g.sign, ln)


def gain_from_kappa(lambda_nm: float, kappa: LogReal | float) -> LogReal:
    """Exact inverse of kappa_from_gain: g = -4 pi kappa / lambda, in 1/cm."""
    if not lambda_nm > 0:
        raise ValueError(f"lambda must be > 0, got {lambda_nm}")
    k = kappa if isinstance(kappa, LogReal) else LogReal.from_float(kappa)
    if k.sign == 0:
        return LogReal.zero()
    ln = k.ln_abs - math.log(lambda_nm) - _LN_CM_PER_NM + _LN_4PI
    return LogReal.from_ln(-k.sign, ln)


# ---------------------------------------------------------------- dispersion

def f1(omega_hat: float, gamma_hat: float) -> float:
    d = (1.0 - omega_hat**2) ** 2 + gamma_hat**2 * omega_hat**2
    return gamma_hat * (1.0 - omega_hat**2) / d


def f2(omega_hat: float, gamma_hat: float) -> float:
    d = (1.0 - omega_hat**2) ** 2 + gamma_hat**2 * omega_hat**2
    return gamma_hat**2 * omega_hat / d


def kappa0_at_resonance(material: GainMaterial, g0_per_cm: float) -> float:
    return -material.lambda0_nm * CM_PER_NM * g0_per_cm / (4.0 * math.pi)


def dispersive_index(
    material: GainMaterial,
    lambda_nm: float,
    g0_per_cm: float,
    band: tuple[float, float] = DEFAULT_BAND,
) -> ComplexIndex:
    """Linearized index at wavelength ``lambda_nm`` for resonance gain g0.

    Valid inside ``band`` (fractions of lambda0); outside it the linearized
    model is not trusted and a ValueError is raised.
    """
    lo, hi = band
    if not lo * material.lambda0_nm <= lambda_nm <= hi * material.lambda0_nm:
        raise ValueError(
            f"lambda = {lambda_nm} nm outside the dispersion trust band "
            f"[{lo * material.lambda0_nm:.6g}, {hi * material.lambda0_nm:.6g}] nm"
        )
    if g0_per_cm < 0:
        raise ValueError(f"g0 must be >= 0, got {g0_per_cm}")
    w = material.lambda0_nm / lambda_nm
    k0 = kappa0_at_resonance(material, g0_per_cm)
    eta = material.n0 + k0 * f1(w, material.gamma_hat)
    kappa = k0 * f2(w, material.gamma_hat)
    return ComplexIndex.from_parts(eta, kappa)


def full_dispersive_index(
    material: GainMaterial, lambda_nm: float, g0_per_cm: float
) -> complex:
    """Un-truncated complex square root of the two-level permittivity.

    Only for error estimation of the linearized model; the solvers use
    ``dispersive_index``.
    """
    w = material.lambda0_nm / lambda_nm
    k0 = kappa0_at_resonance(material, g0_per_cm)
    wp2 = 2.0 * material.n0 * material.gamma_hat * k0
    eps = material.n0**2 - wp2 / (w**2 - 1.0 + 1j * material.gamma_hat * w)
    root = complex(eps) ** 0.5
    return root if root.real >= 0 else -root


# ------------------------------------------------------------------- presets

_MATERIAL_KEYS = ("n0", "lambda0_nm", "gamma_hat", "g0_max_per_cm")


def load_material_file(path: str | Path) -> GainMaterial:
    """Parse a flat key-value material file (``key = value`` per line).

    Exactly the four keys n0, lambda0_nm, gamma_hat, g0_max_per_cm are
    required; unknown keys are rejected.
    """
    path = Path(path)
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _MATERIAL_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad number for {key!r}: {val.strip()!r}") from exc
    missing = [k for k in _MATERIAL_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing material key(s): {', '.join(missing)}")
    return GainMaterial(**values)


def preset(name_or_path: str) -> GainMaterial:
    """A named preset ("ndyag") or a material config file path."""
    key = name_or_path.lower()
    if key in _PRESETS:
        return _PRESETS[key]
    p = Path(name_or_path)
    if p.exists():
        return load_material_file(p)
    raise ValueError(
        f"unknown material {name_or_path!r}: not a preset "
        f"({', '.join(sorted(_PRESETS))}) and no such file"
    )
