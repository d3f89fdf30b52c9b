"""
Precision contexts and error-tracked high-precision reals.

``HPReal`` wraps an ``mpmath.mpf`` together with an absolute error bound and the
``PrecisionContext`` it was computed under. mpmath keeps its working precision in
process-global state, so every evaluation goes through ``working_precision``,
which holds a re-entrant lock while the precision is changed.
"""

from __future__ import annotations

import math
import sys
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, TypeAlias, Union

import mpmath
from mpmath import mpf
from pydantic import BaseModel, ConfigDict, Field

from machin_forge.errors import DomainError, PrecisionExhaustedError

# u2 numerators run to tens of thousands of digits at k=12.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


BigRational: TypeAlias = Fraction
"""Exact rational. ``Fraction`` keeps ``den > 0`` and ``gcd(|num|, den) == 1``."""

LOG10_2 = math.log10(2)

_MP_LOCK = threading.RLock()


@contextmanager
def working_precision(dps: int) -> Iterator[None]:
    """Run a block with mpmath at ``dps`` decimal digits, serialized across threads."""
    with _MP_LOCK, mpmath.workdps(dps):
        yield


def as_rational(value: Union[int, str, Fraction, dict]) -> Fraction:
    """Parse an int, ``"p/q"`` string, Fraction or ``{"num", "den"}`` mapping."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, dict):
        try:
            num, den = int(value["num"]), int(value["den"])
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"Malformed rational mapping: {value!r}") from e
        if den == 0:
            raise DomainError("Rational with zero denominator")
        return Fraction(num, den)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"Malformed rational: {value!r}") from e
    raise DomainError(f"Cannot interpret {type(value).__name__} as a rational")


# =============================================================================
# Precision context
# =============================================================================

@lru_cache(maxsize=256)
def _unit_roundoff(working: int) -> mpf:
    # 10^(1-working) overestimates mpmath's 2^-prec rounding by ~100x.
    with working_precision(working):
        return mpf(10) ** (1 - working)


class PrecisionContext(BaseModel):
    """Requested decimal digits plus guard digits."""

    model_config = ConfigDict(frozen=True)

    digits: int = Field(default=50, ge=1)
    guard: int = Field(default=10, ge=0)

    @property
    def working(self) -> int:
        return self.digits + self.guard

    @property
    def eps(self) -> mpf:
        """Relative rounding bound of one arithmetic operation at working precision."""
        return _unit_roundoff(self.working)

    def activate(self):
        return working_precision(self.working)

    def tolerance(self, magnitude: mpf) -> mpf:
        with self.activate():
            return mpf(10) ** (-self.digits) * max(mpf(1), abs(magnitude))

    def widened(self, extra_digits: int = 0, extra_guard: int = 0) -> "PrecisionContext":
        return PrecisionContext(digits=self.digits + extra_digits, guard=self.guard + extra_guard)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(digits=2 * self.digits, guard=self.guard)

    @staticmethod
    def guard_for_steps(steps: int) -> int:
        """Guard digits for an additive chain of ``steps`` operations."""
        return 10 + math.ceil(math.log10(max(steps, 1)))

    @staticmethod
    def guard_for_doublings(doublings: int) -> int:
        """Guard digits for ``doublings`` tangent doublings; rounding grows ~2x per step."""
        return PrecisionContext.guard_for_steps(doublings + 1) + math.ceil(doublings * LOG10_2)

    @classmethod
    def for_steps(cls, digits: int, steps: int) -> "PrecisionContext":
        return cls(digits=digits, guard=cls.guard_for_steps(steps))

    @classmethod
    def for_doublings(cls, digits: int, doublings: int) -> "PrecisionContext":
        return cls(digits=digits, guard=cls.guard_for_doublings(doublings))

    def __str__(self) -> str:
        return f"{self.digits}+{self.guard} digits"


def _exact_neg(v: mpf) -> mpf:
    # bare -v rounds to the global precision (53 bits outside a context)
    return mpmath.fneg(v, exact=True)


def _exact_abs(v: mpf) -> mpf:
    return _exact_neg(v) if v < 0 else v


def finer(a: PrecisionContext, b: PrecisionContext) -> PrecisionContext:
    return a if (a.working, a.digits) >= (b.working, b.digits) else b


# =============================================================================
# High-precision real
# =============================================================================

Operand = Union["HPReal", int, Fraction]


@dataclass(frozen=True, slots=True)
class HPReal:
    """A real number ``value ± err_bound`` computed under ``ctx``."""

    value: mpf
    err_bound: mpf
    ctx: PrecisionContext

    # -------------------------------------------------------------------------
    # Construction
    # -------------------------------------------------------------------------

    @classmethod
    def zero(cls, ctx: PrecisionContext) -> "HPReal":
        with ctx.activate():
            return cls(mpf(0), mpf(0), ctx)

    @classmethod
    def from_rational(cls, x: Union[int, Fraction], ctx: PrecisionContext) -> "HPReal":
        x = Fraction(x)
        with ctx.activate():
            if x.denominator == 1:
                value = mpf(x.numerator)
                err = mpf(0) if int(value) == x.numerator else ctx.eps * abs(value)
            else:
                value = mpf(x.numerator) / x.denominator
                err = 2 * ctx.eps * abs(value)
        return cls(value, err, ctx)

    @classmethod
    def from_string(
        cls, text: str, ctx: PrecisionContext, err_bound: str | None = None
    ) -> "HPReal":
        """Parse a decimal literal, optionally with an explicit error bound."""
        with ctx.activate():
            value = mpf(text)
            err = ctx.eps * abs(value) if err_bound is None else mpf(err_bound)
        return cls(value, err, ctx)

    @classmethod
    def from_mpf(cls, value: mpf, ctx: PrecisionContext, err_bound: mpf | None = None) -> "HPReal":
        """Wrap a value produced at ``ctx`` working precision (one rounding unless told)."""
        with ctx.activate():
            value = mpf(value)
            err = ctx.eps * abs(value) if err_bound is None else mpf(err_bound)
        return cls(value, err, ctx)

    # -------------------------------------------------------------------------
    # Arithmetic with error propagation
    # -------------------------------------------------------------------------

    def _pair(self, other: Operand) -> tuple["HPReal", PrecisionContext]:
        other = as_hp(other, self.ctx)
        return other, finer(self.ctx, other.ctx)

    def __neg__(self) -> "HPReal":
        return HPReal(_exact_neg(self.value), self.err_bound, self.ctx)

    def __abs__(self) -> "HPReal":
        return HPReal(_exact_abs(self.value), self.err_bound, self.ctx)

    def __add__(self, other: Operand) -> "HPReal":
        other, ctx = self._pair(other)
        with ctx.activate():
            value = self.value + other.value
            err = self.err_bound + other.err_bound + ctx.eps * abs(value)
        return HPReal(value, err, ctx)

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "HPReal":
        return self + (-as_hp(other, self.ctx))

    def __rsub__(self, other: Operand) -> "HPReal":
        return as_hp(other, self.ctx) - self

    def __mul__(self, other: Operand) -> "HPReal":
        other, ctx = self._pair(other)
        with ctx.activate():
            value = self.value * other.value
            err = (
                abs(self.value) * other.err_bound
                + abs(other.value) * self.err_bound
                + self.err_bound * other.err_bound
                + ctx.eps * abs(value)
            )
        return HPReal(value, err, ctx)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "HPReal":
        other, ctx = self._pair(other)
        with ctx.activate():
            den = abs(other.value)
            if den <= other.err_bound:
                raise PrecisionExhaustedError(
                    f"divisor {mpmath.nstr(other.value, 8)} is indistinguishable from zero"
                )
            value = self.value / other.value
            err = (abs(self.value) * other.err_bound + den * self.err_bound) / (
                den * (den - other.err_bound)
            ) + ctx.eps * abs(value)
        return HPReal(value, err, ctx)

    def __rtruediv__(self, other: Operand) -> "HPReal":
        return as_hp(other, self.ctx) / self

    def scaled(self, power_of_two: int) -> "HPReal":
        """Exact multiplication by 2**power_of_two."""
        with self.ctx.activate():
            return HPReal(
                mpmath.ldexp(self.value, power_of_two),
                mpmath.ldexp(self.err_bound, power_of_two),
                self.ctx,
            )

    # -------------------------------------------------------------------------
    # Queries
    # -------------------------------------------------------------------------

    @property
    def tolerance(self) -> mpf:
        return self.ctx.tolerance(self.value)

    def meets_tolerance(self) -> bool:
        with self.ctx.activate():
            return self.err_bound <= self.tolerance

    def require_precision(self, operation: str) -> "HPReal":
        if not self.meets_tolerance():
            raise PrecisionExhaustedError(
                f"{operation}: error bound {mpmath.nstr(self.err_bound, 5)} exceeds the "
                f"{self.ctx.digits}-digit tolerance; raise the precision"
            )
        return self

    def sign(self) -> int:
        """Sign of the value if certain, else 0."""
        if _exact_abs(self.value) <= self.err_bound:
            return 0
        return 1 if self.value > 0 else -1

    def agrees_with(self, other: Operand, slack: mpf | int = 0) -> bool:
        """True when the two error intervals overlap (plus ``slack``)."""
        other, ctx = self._pair(other)
        with ctx.activate():
            return abs(self.value - other.value) <= self.err_bound + other.err_bound + slack

    def with_context(self, ctx: PrecisionContext) -> "HPReal":
        return HPReal(self.value, self.err_bound, ctx)

    def fixed(self, places: int) -> str:
        """Decimal string truncated toward zero after ``places`` fractional digits."""
        int_digits = max(0, int(mpmath.mag(self.value))) // 3 + 1 if self.value else 0
        with working_precision(max(self.ctx.working, places + 20) + int_digits):
            scaled = int(mpmath.floor(abs(self.value) * mpf(10) ** places))
        sign = "-" if self.value < 0 else ""
        whole, frac = divmod(scaled, 10**places)
        if places == 0:
            return f"{sign}{whole}"
        return f"{sign}{whole}.{frac:0{places}d}"

    def nstr(self, n: int = 15) -> str:
        with self.ctx.activate():
            return mpmath.nstr(self.value, n)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.nstr(min(self.ctx.digits, 30))

    def __repr__(self) -> str:
        return (
            f"HPReal({self.nstr(min(self.ctx.digits, 20))} "
            f"± {mpmath.nstr(self.err_bound, 3)}, {self.ctx})"
        )


def as_hp(x: Union[HPReal, int, Fraction, float, str], ctx: PrecisionContext) -> HPReal:
    """Coerce an operand to ``HPReal`` at ``ctx`` (HPReal values pass through)."""
    if isinstance(x, HPReal):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite input {x}")
        return HPReal.from_rational(Fraction(x), ctx)
    return HPReal.from_rational(as_rational(x), ctx)


def reference_pi(ctx: PrecisionContext) -> HPReal:
    """mpmath's π at working precision; the oracle for digit counting."""
    with ctx.activate():
        value = +mpmath.pi
        return HPReal(value, ctx.eps * value, ctx)


# =============================================================================
# Square root and log10
# =============================================================================

def sqrt_hp(x: Union[HPReal, int, Fraction], ctx: PrecisionContext) -> HPReal:
    """√x with tracked error; exact for rational perfect squares."""
    if not isinstance(x, HPReal):
        q = as_rational(x)
        if q < 0:
            raise DomainError(f"sqrt of negative value {q}")
        num_root, den_root = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if num_root * num_root == q.numerator and den_root * den_root == q.denominator:
            return HPReal.from_rational(Fraction(num_root, den_root), ctx)
        x = HPReal.from_rational(q, ctx)

    if x.value < 0 and _exact_neg(x.value) > x.err_bound:
        raise DomainError(f"sqrt of negative value {x.nstr(10)}")

    with ctx.activate():
        if x.value <= x.err_bound:
            # interval touches zero: √ of anything in [0, 2e] is within √(2e)
            return HPReal(mpf(0), mpmath.sqrt(2 * x.err_bound), ctx).require_precision("sqrt_hp")
        root = mpmath.sqrt(x.value)
        err = x.err_bound / root + ctx.eps * root
    return HPReal(root, err, ctx).require_precision("sqrt_hp")


def _log10_int(n: int, ctx: PrecisionContext) -> tuple[mpf, mpf]:
    """log10(n) for n > 0 from its digit count and a leading-digit mantissa."""
    keep = ctx.working + 5
    shift = max(0, int(n.bit_length() * LOG10_2) - keep)
    mantissa = n // 10**shift if shift else n
    with ctx.activate():
        value = shift + mpmath.log10(mantissa)
        # mantissa keeps >= keep-1 digits, so truncation is below 10^-(keep-2)
        err = ctx.eps * abs(value) + (mpf(10) ** (2 - keep) if shift else 0)
    return value, err


def log10_abs(x: Union[HPReal, int, Fraction], ctx: PrecisionContext) -> HPReal:
    """log10|x|. Rationals never get converted whole to floating point."""
    if isinstance(x, HPReal):
        with ctx.activate():
            magnitude = abs(x.value)
            if magnitude <= x.err_bound:
                raise DomainError("log10 of a value indistinguishable from zero")
            value = mpmath.log10(magnitude)
            err = (
                x.err_bound / (magnitude - x.err_bound) / mpmath.log(10)
                + ctx.eps * max(mpf(1), abs(value))
            )
        return HPReal(value, err, ctx).require_precision("log10_abs")

    q = as_rational(x)
    if q == 0:
        raise DomainError("log10 of zero")
    num_log, num_err = _log10_int(abs(q.numerator), ctx)
    den_log, den_err = _log10_int(q.denominator, ctx)
    with ctx.activate():
        value = num_log - den_log
        err = num_err + den_err + ctx.eps * abs(value)
    return HPReal(value, err, ctx).require_precision("log10_abs")
