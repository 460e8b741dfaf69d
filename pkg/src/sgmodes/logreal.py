"""Signed-logarithm representation of real scalars.

Gain coefficients and the imaginary part of the refractive index span
hundreds of orders of magnitude in this problem (|kappa| ranges from
~1e-222 up to ~1e-4 across a single mode table), so intermediate products
cannot be formed in IEEE doubles.  A LogReal stores the sign and the
natural log of the magnitude instead; multiplication and division then
reduce to addition in log space and never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_LN10 = math.log(10.0)
# exp() overflows above this; to_float raises instead of returning inf
_MAX_LN = math.log(math.nextafter(math.inf, 0.0))


@dataclass(frozen=True)
class LogReal:
    """A real number stored as ``sign * exp(ln_abs)``.

    ``sign`` is -1, 0 or +1.  When ``sign == 0`` the number is exactly zero
    and ``ln_abs`` is pinned to ``-inf``.  A float cached at construction
    time makes ``from_float``/``to_float`` round trips exact.
    """

    sign: int
    ln_abs: float
    _cached: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign == 0 and self.ln_abs != float("-inf"):
            object.__setattr__(self, "ln_abs", float("-inf"))

    # ---------------------------------------------------------------- create
    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, float("-inf"))

    @classmethod
    def from_float(cls, x: float) -> "LogReal":
        x = float(x)
        if x == 0.0:
            return cls.zero()
        if math.isinf(x) or math.isnan(x):
            raise ValueError(f"cannot represent {x!r} as LogReal")
        return cls(int(math.copysign(1.0, x)), math.log(abs(x)), _cached=x)

    @classmethod
    def from_ln(cls, sign: int, ln_abs: float) -> "LogReal":
        if sign == 0:
            return cls.zero()
        return cls(sign, float(ln_abs))

    @classmethod
    def from_log10(cls, sign: int, log10_abs: float) -> "LogReal":
        if sign == 0:
            return cls.zero()
        return cls(sign, float(log10_abs) * _LN10)

    @classmethod
    def from_mantissa_exp10(cls, mantissa: float, exp10: int) -> "LogReal":
        """E.g. ``from_mantissa_exp10(-1.310, -195)`` for -1.310e-195."""
        if mantissa == 0.0:
            return cls.zero()
        sign = 1 if mantissa > 0 else -1
        return cls(sign, math.log(abs(mantissa)) + exp10 * _LN10)

    # --------------------------------------------------------------- convert
    def to_float(self) -> float:
        """Nearest double.  Raises OverflowError above the double range;
        magnitudes below the subnormal range underflow to signed zero."""
        if self.sign == 0:
            return 0.0
        if self._cached is not None:
            return self._cached
        if self.ln_abs > _MAX_LN:
            raise OverflowError(
                f"LogReal magnitude exp({self.ln_abs:.6g}) exceeds double range"
            )
        return self.sign * math.exp(self.ln_abs)

    @property
    def log10(self) -> float:
        return self.ln_abs / _LN10

    def sci_string(self, digits: int = 3) -> str:
        """Decimal scientific string, valid far outside the double range."""
        if self.sign == 0:
            return "0"
        exp10 = math.floor(self.log10)
        mant = 10.0 ** (self.log10 - exp10)
        # rounding can push the mantissa to 10.0
        if round(mant, digits) >= 10.0:
            mant /= 10.0
            exp10 += 1
        s = "-" if self.sign < 0 else ""
        return f"{s}{mant:.{digits}f}e{exp10:+03d}"

    # ------------------------------------------------------------ arithmetic
    def __neg__(self) -> "LogReal":
        c = None if self._cached is None else -self._cached
        return LogReal(-self.sign, self.ln_abs, _cached=c)

    def __abs__(self) -> "LogReal":
        if self.sign >= 0:
            return self
        return -self

    def _coerce(self, other: "LogReal | float | int") -> "LogReal":
        if isinstance(other, LogReal):
            return other
        return LogReal.from_float(other)

    def __mul__(self, other: "LogReal | float | int") -> "LogReal":
        o = self._coerce(other)
        if self.sign == 0 or o.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * o.sign, self.ln_abs + o.ln_abs)

    __rmul__ = __mul__

    def __truediv__(self, other: "LogReal | float | int") -> "LogReal":
        o = self._coerce(other)
        if o.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * o.sign, self.ln_abs - o.ln_abs)

    def ratio(self, other: "LogReal") -> float:
        """self/other as a float; safe when both are far outside double range."""
        if other.sign == 0:
            raise ZeroDivisionError("LogReal ratio with zero denominator")
        if self.sign == 0:
            return 0.0
        return self.sign * other.sign * math.exp(self.ln_abs - other.ln_abs)

    # -------------------------------------------------------------- ordering
    def __lt__(self, other: "LogReal") -> bool:
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        if self.sign > 0:
            return self.ln_abs < other.ln_abs
        return self.ln_abs > other.ln_abs

    def __le__(self, other: "LogReal") -> bool:
        return self < other or self == other

    def __float__(self) -> float:
        return self.to_float()

    def __str__(self) -> str:
        return self.sci_string(6)
