"""
Exact construction and verification of Machin-like formulas.

A term A·arctan(1/B) with B = p/q corresponds to the unit Gaussian rational
((p + qi)/(p - qi))^A, so π/4 = Σ Aⱼ·arctan(1/Bⱼ) holds exactly when the product
of those powers is i. The two-term formula

    π/4 = 2^(k-1)·arctan(1/u1) + arctan(1/u2)

gets its rational companion u2 from the power ((u1 + i)/(u1 - i))^(2^(k-1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import mpf

from machin_forge.errors import (
    ConsistencyError,
    DegenerateAngleError,
    DomainError,
    MaterializationCapError,
    PoleProximityError,
    PrecisionExhaustedError,
)
from machin_forge.log import get_logger
from machin_forge.models import MachinFormula, TwoTermFormula
from machin_forge.numerics import (
    HPReal,
    PrecisionContext,
    SeriesKind,
    TangentSeed,
    arctan,
    arctan_euler,
    as_rational,
    log10_abs,
    reference_pi,
    tan_doubling,
    working_precision,
)
from machin_forge.solver import u1_surdless

logger = get_logger("machin")

Rational = Union[int, Fraction]
AnyFormula = Union[MachinFormula, TwoTermFormula]

DEFAULT_U2_CAP = 24


# =============================================================================
# Gaussian rationals
# =============================================================================

@dataclass(frozen=True, slots=True)
class GaussianRational:
    """re + i·im with exact rational parts."""

    re: Fraction
    im: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def unit(cls, base: Rational) -> "GaussianRational":
        """(B + i)/(B - i) for B = p/q, i.e. ((p² - q²) + 2pq·i)/(p² + q²)."""
        b = as_rational(base)
        if b == 0:
            raise DomainError("arctan(1/B) needs B != 0")
        p, q = b.numerator, b.denominator
        norm = p * p + q * q
        return cls(Fraction(p * p - q * q, norm), Fraction(2 * p * q, norm))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        return self * other.inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    @property
    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_unit(self) -> bool:
        return self.norm == 1

    def inverse(self) -> "GaussianRational":
        norm = self.norm
        if norm == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __pow__(self, exponent: int) -> "GaussianRational":
        """Binary powering; negative exponents invert first."""
        base = self
        if exponent < 0:
            base, exponent = self.inverse(), -exponent
        result = ONE
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __str__(self) -> str:
        return f"({self.re}) + ({self.im})i"


ONE = GaussianRational(Fraction(1), Fraction(0))
I = GaussianRational(Fraction(0), Fraction(1))


# =============================================================================
# Two-step iteration and the second constant
# =============================================================================

def _doubled_components(u1: Rational, k: int) -> tuple[int, int, int]:
    """Integers (X, Y, D) with σₖ = X/D and τₖ = Y/D, reduced only at the end."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    u = as_rational(u1)
    p, q = u.numerator, u.denominator
    x, y, d = p * p - q * q, 2 * p * q, p * p + q * q
    for _ in range(k - 1):
        x, y, d = x * x - y * y, 2 * x * y, d * d
    return x, y, d


def two_step_iteration(u1: Rational, k: int) -> GaussianRational:
    """(σₖ, τₖ) from σ₁ = (u²-1)/(u²+1), τ₁ = 2u/(u²+1) and k-1 squarings."""
    x, y, d = _doubled_components(u1, k)
    return GaussianRational(Fraction(x, d), Fraction(y, d))


def u2_exact(
    u1: Rational,
    k: int,
    force: bool = False,
    cap: int = DEFAULT_U2_CAP,
) -> Fraction:
    """u2 = σₖ/(1 - τₖ), exactly."""
    if k > cap and not force:
        raise MaterializationCapError(k, cap)
    x, y, d = _doubled_components(u1, k)
    if y == d:
        raise DegenerateAngleError(f"tau_{k} = 1 for u1 = {u1}: the second angle vanishes")
    logger.debug("u2_exact(k=%d): denominator has ~%d bits", k, d.bit_length())
    return Fraction(x, d - y)


def u2_from_power(u1: Rational, k: int) -> Fraction:
    """u2 = 2/(z - i) - i with z = ((u1 + i)/(u1 - i))^(2^(k-1))."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    z = GaussianRational.unit(u1) ** (2 ** (k - 1))
    if z == I:
        raise DegenerateAngleError(f"z = i for u1 = {u1}, k = {k}")
    value = GaussianRational(Fraction(2), Fraction(0)) / (z - I) - I
    if value.im != 0:
        raise ConsistencyError(f"u2 kept an imaginary part {value.im}", k=k)
    return value.re


def beta2_from_alpha(alpha: int, beta1: Rational) -> Fraction:
    """β₂ with π/4 = α·arctan(1/β₁) + arctan(1/β₂), via binary powering."""
    if alpha < 1:
        raise DomainError(f"alpha must be a positive integer, got {alpha}")
    b1 = as_rational(beta1)
    if b1 <= 1:
        raise DomainError(f"beta1 must be a rational greater than 1, got {b1}")
    z = GaussianRational.unit(b1) ** alpha
    if z.im == 1:
        raise DegenerateAngleError(f"Im = 1 for alpha = {alpha}, beta1 = {b1}")
    return z.re / (1 - z.im)


def _doubling_guard(k: int) -> int:
    return math.ceil(max(k - 1, 0) * math.log10(2)) + 5


def u2_trig(u1: int, k: int, ctx: PrecisionContext) -> HPReal:
    """cos(A)/(1 - sin A) with A = 2^(k-1)·arctan(2u1/(u1² - 1))."""
    if u1 < 2:
        raise DomainError(f"u2_trig needs u1 >= 2, got {u1}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")

    def evaluate(work: PrecisionContext) -> HPReal:
        angle = arctan_euler(Fraction(2 * u1, u1 * u1 - 1), work).scaled(k - 1)
        with work.activate():
            spread = angle.err_bound + work.eps * abs(angle.value)
            c, s = mpmath.cos(angle.value), mpmath.sin(angle.value)
            cosine = HPReal(c, spread + work.eps, work)
            sine = HPReal(s, spread + work.eps, work)
        denominator = 1 - sine
        if denominator.sign() == 0:
            raise PrecisionExhaustedError(f"u2_trig: 1 - sin(A) vanishes at {work}")
        return cosine / denominator

    work = ctx.widened(extra_guard=_doubling_guard(k))
    result = evaluate(work)
    if not result.with_context(ctx).meets_tolerance():
        # 1 - sin A ~ 1/(2·u2²) cancels about 2·log10|u2| digits
        with work.activate():
            lost = int(2 * mpmath.log10(abs(result.value) + 1)) + 4
        result = evaluate(work.widened(extra_guard=lost))
    return result.with_context(ctx).require_precision("u2_trig")


def u2_approx(u1: int, k: int, ctx: PrecisionContext, form: str = "simplified") -> HPReal:
    """2/(1 - tan θ) (simplified) or (1 + tan²θ)/(1 - tan θ) (refined), θ = 2^(k-1)/u1."""
    if form not in ("simplified", "refined"):
        raise DomainError(f"unknown u2 approximation form {form!r}")
    if u1 < 1 or k < 1:
        raise DomainError(f"u2_approx needs u1 >= 1 and k >= 1, got u1={u1}, k={k}")
    # 1 - tan θ is O(2^-k): it cancels ~0.3k digits on top of the doubling growth
    work = ctx.widened(extra_guard=2 * _doubling_guard(k))
    t = tan_doubling(Fraction(1, u1), k - 1, work, seed=TangentSeed.EXACT)
    denominator = 1 - t
    if denominator.sign() == 0:
        raise PoleProximityError(f"tan(2^{k - 1}/{u1}) is indistinguishable from 1")
    numerator = 2 if form == "simplified" else 1 + t * t
    return (numerator / denominator).with_context(ctx).require_precision("u2_approx")


# =============================================================================
# Verification and identities
# =============================================================================

def _pairs(f: AnyFormula) -> list[tuple[int, Fraction]]:
    if isinstance(f, TwoTermFormula):
        f = f.to_machin()
    return f.as_pairs()


def _branch_value(pairs: list[tuple[int, Fraction]]) -> mpf:
    with working_precision(30):
        return mpmath.fsum(
            a * mpmath.atan(mpf(b.denominator) / b.numerator) for a, b in pairs
        )


def verify_formula(f: AnyFormula, target: Rational = 1) -> bool:
    """Exact check of Σ Aⱼ·arctan(1/Bⱼ) = arctan(target) (π/4 by default).

    Equivalent to Π ((Bⱼ + i)/(Bⱼ - i))^Aⱼ = (1 + it)/(1 - it). The exact product
    only fixes the angle modulo π, so a 30-digit evaluation picks the branch.
    """
    pairs = _pairs(f)
    t = as_rational(target)
    expected = ONE if t == 0 else GaussianRational.unit(1 / t)

    product = ONE
    for a, b in pairs:
        product = product * GaussianRational.unit(b) ** a
    if product != expected:
        return False

    with working_precision(30):
        return abs(_branch_value(pairs) - mpmath.atan(mpf(t.numerator) / t.denominator)) < 1


def identity9_terms(n_terms: int) -> MachinFormula:
    """π/4 = Σ_{n=1..N} arctan(N/((n-1)n + N²))."""
    if n_terms < 1:
        raise DomainError(f"N must be >= 1, got {n_terms}")
    square = n_terms * n_terms
    return MachinFormula.from_pairs(
        (1, Fraction((n - 1) * n + square, n_terms)) for n in range(1, n_terms + 1)
    )


# =============================================================================
# Lehmer's measure
# =============================================================================

def lehmer_measure(f: AnyFormula, ctx: PrecisionContext) -> HPReal:
    """μ = Σ 1/log10|Bⱼ|."""
    total = HPReal.zero(ctx)
    for _, b in _pairs(f):
        if abs(b) <= 1:
            raise DomainError(f"Lehmer's measure needs |B| > 1, got {b}")
        total = total + 1 / log10_abs(b, ctx)
    return total.require_precision("lehmer_measure")


def log10_u2_estimate(k: int, u1: int, ctx: PrecisionContext) -> HPReal:
    """log10|u2| of the two-term formula without materializing u2.

    arctan(1/u2) equals the residual angle ρ = π/4 - 2^(k-1)·arctan(1/u1), so
    log10|u2| = -log10|tan ρ|. The result carries the widened working context.
    """
    if u1 < 2:
        raise DomainError(f"u1 must be >= 2, got {u1}")
    # ρ ~ 1/u2 is far below 1, and 2^(k-1) amplifies the arctan error
    extra = _doubling_guard(k) + math.ceil(2 * math.log10(u1)) + 5
    work = ctx.widened(extra_guard=extra)
    rho = reference_pi(work).scaled(-2) - arctan_euler(Fraction(1, u1), work).scaled(k - 1)
    if rho.sign() == 0:
        raise PrecisionExhaustedError(f"residual angle for k={k} is below {work}")
    with work.activate():
        t = mpmath.tan(rho.value)
        tan_rho = HPReal(t, rho.err_bound * (1 + t * t) * 2 + work.eps * abs(t), work)
    return -log10_abs(tan_rho, work)


def lehmer_estimate_two_term(k: int, u1: int, ctx: PrecisionContext) -> HPReal:
    """μ = 1/log10(u1) + 1/log10|u2| with u2 taken from the residual angle."""
    if k < 4:
        raise DomainError(f"the estimate is meant for k >= 4, got {k}")
    log_u2 = log10_u2_estimate(k, u1, ctx)
    mu = 1 / log10_abs(u1, log_u2.ctx) + 1 / log_u2
    return mu.with_context(ctx).require_precision("lehmer_estimate_two_term")


def digits_per_term_two_term(k: int, u1: int) -> float:
    """``digits_per_term`` for the two-term formula, u2 only through its magnitude."""
    ctx = PrecisionContext(digits=12, guard=4)
    log_u2 = float(log10_u2_estimate(k, u1, ctx).value)
    return min(float(log10_abs(1 + u1 * u1, ctx).value), 2 * log_u2)


def digits_per_term(f: AnyFormula) -> float:
    """Digits gained per Euler-series term by the slowest-converging summand."""
    ctx = PrecisionContext(digits=12, guard=4)
    return min(float(log10_abs(1 + b * b, ctx).value) for _, b in _pairs(f))


# =============================================================================
# π digits
# =============================================================================

def _certified_digits(
    pairs: list[tuple[int, Fraction]], ctx: PrecisionContext, series: SeriesKind, digits: int
) -> Optional[str]:
    total = HPReal.zero(ctx)
    for a, b in pairs:
        total = total + arctan(Fraction(b.denominator, b.numerator), ctx, series) * a
    pi = total.scaled(2)
    with ctx.activate():
        low = HPReal(pi.value - pi.err_bound, mpf(0), ctx).fixed(digits)
        high = HPReal(pi.value + pi.err_bound, mpf(0), ctx).fixed(digits)
    return low if low == high else None


def compute_pi(
    f: AnyFormula,
    digits: int,
    series: SeriesKind = SeriesKind.EULER,
    guard: int = 10,
    max_escalations: int = 4,
) -> str:
    """π truncated to ``digits`` decimals from 4·Σ Aⱼ·arctan(1/Bⱼ).

    The digits are accepted only when the error interval pins every one of them
    and a recomputation with 10 more digits agrees.
    """
    if digits < 1:
        raise DomainError(f"digits must be >= 1, got {digits}")
    series = SeriesKind(series)
    pairs = _pairs(f)
    coefficient_digits = math.ceil(math.log10(sum(abs(a) for a, _ in pairs) + 1))
    ctx = PrecisionContext(digits=digits + 1, guard=guard + coefficient_digits)

    for attempt in range(max_escalations + 1):
        first = _certified_digits(pairs, ctx, series, digits)
        if first is not None:
            check = _certified_digits(pairs, ctx.widened(extra_digits=10), series, digits)
            if first == check:
                return first
        ctx = ctx.widened(extra_digits=10 * (attempt + 1))
        logger.warning("pi digits not certified; retrying at %s", ctx)
    raise PrecisionExhaustedError(f"could not certify {digits} digits of π")


# =============================================================================
# Formula construction and built-ins
# =============================================================================

def build_two_term_formula(
    k: int,
    u1: Optional[int] = None,
    ctx: Optional[PrecisionContext] = None,
    force: bool = False,
    cap: int = DEFAULT_U2_CAP,
) -> TwoTermFormula:
    """The two-term formula for k; u1 defaults to the surd-free recurrence."""
    if k < 2:
        raise DomainError(f"two-term formulas need k >= 2, got {k}")
    if k > cap and not force:
        raise MaterializationCapError(k, cap)
    if u1 is None:
        u1 = u1_surdless(k, ctx)
    return TwoTermFormula(k=k, u1=u1, u2=u2_exact(u1, k, force=force, cap=cap))


BUILTIN_FORMULAS: dict[str, MachinFormula] = {
    "machin": MachinFormula.from_pairs([(4, 5), (-1, 239)]),
    "kanada1": MachinFormula.from_pairs([(44, 57), (7, 239), (-12, 682), (24, 12943)]),
    "kanada2": MachinFormula.from_pairs([(12, 49), (32, 57), (-5, 239), (12, 110443)]),
}


def get_builtin(name: str) -> MachinFormula:
    """Get a built-in formula by name."""
    if name not in BUILTIN_FORMULAS:
        raise ValueError(f"Unknown formula '{name}'. Available: {', '.join(BUILTIN_FORMULAS)}")
    return BUILTIN_FORMULAS[name]
