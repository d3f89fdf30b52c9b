"""
Tangent evaluators.

``tan_bernoulli`` sums the Bernoulli-coefficient Maclaurin series and serves as
the cross-check reference. ``tan_doubling`` is the workhorse: a small-angle seed
followed by repeated double-angle steps fₙ = 2fₙ₋₁/(1 - fₙ₋₁²).
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Union

import mpmath
from mpmath import mpf

from machin_forge.errors import DomainError, PoleProximityError
from machin_forge.log import get_logger
from machin_forge.numerics.precision import HPReal, PrecisionContext, as_hp

logger = get_logger("numerics.tangent")

Argument = Union[HPReal, int, Fraction]

# Upper bound on 2ζ(2n)(1 - 4^-n), so the n-th tangent coefficient is <= 3.29·(2/π)^(2n).
TANGENT_COEFFICIENT_BOUND = 3.29


# =============================================================================
# Bernoulli numbers
# =============================================================================

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bₙ from the double sum Σₘ 1/(m+1) Σₗ (-1)^ℓ C(m,ℓ) ℓⁿ (so B₁ = -1/2).

    The double sum is slow by nature; the memo table makes repeats free and
    ``lru_cache`` serializes its bookkeeping across threads.
    """
    if n < 0:
        raise DomainError(f"Bernoulli index must be >= 0, got {n}")
    total = Fraction(0)
    for m in range(n + 1):
        inner = sum((-1) ** ell * comb(m, ell) * ell**n for ell in range(m + 1))
        if inner:
            total += Fraction(inner, m + 1)
    return total


@lru_cache(maxsize=64)
def tangent_coefficients(terms: int) -> tuple[Fraction, ...]:
    """Coefficients of x, x³, x⁵, ... in tan x: (-1)^(n-1) 4ⁿ(4ⁿ-1)B₂ₙ/(2n)!."""
    if terms < 1:
        raise DomainError(f"need at least one term, got {terms}")
    coefficients = []
    factorial = 1
    four_n = 1
    for n in range(1, terms + 1):
        factorial *= (2 * n - 1) * (2 * n)
        four_n *= 4
        sign = 1 if n % 2 else -1
        coefficients.append(sign * four_n * (four_n - 1) * bernoulli(2 * n) / factorial)
    return tuple(coefficients)


def tangent_terms_for(x: Union[float, Fraction, int], ctx: PrecisionContext) -> int:
    """Series terms needed before the tail drops under 10^-(digits+guard)."""
    y = abs(float(x))
    if y == 0:
        return 1
    if y >= math.pi / 2:
        raise DomainError(f"tangent series diverges at |x| = {y} >= π/2")
    r = (2 * y / math.pi) ** 2
    # tail after N terms <= (3.29/y) r^(N+1) / (1 - r)
    log_scale = math.log10(TANGENT_COEFFICIENT_BOUND / (y * (1 - r)))
    needed = (-ctx.working - log_scale) / math.log10(r) - 1
    return max(1, math.ceil(needed))


def _series_tail(y: mpf, terms: int) -> mpf:
    """Bound on the tangent series tail after ``terms`` terms at |x| = y."""
    r = (2 * y / mpmath.pi) ** 2
    return TANGENT_COEFFICIENT_BOUND / y * r ** (terms + 1) / (1 - r)


def tan_bernoulli(
    x: Argument, terms: int, ctx: PrecisionContext, include_truncation: bool = False
) -> HPReal:
    """The first ``terms`` terms of the tangent Maclaurin series (Horner in x²).

    The error bound covers rounding only, unless ``include_truncation`` adds the
    series tail. The digit tolerance is checked against rounding alone.
    """
    xr = as_hp(x, ctx)
    coefficients = tangent_coefficients(terms)
    with ctx.activate():
        v = xr.value
        if abs(v) + xr.err_bound >= mpmath.pi / 2:
            raise DomainError(f"tan_bernoulli needs |x| < π/2, got {mpmath.nstr(v, 10)}")
        if v == 0:
            return HPReal(mpf(0), xr.err_bound, ctx)
        y = v * v
        acc = mpf(0)
        for c in reversed(coefficients):
            acc = acc * y + mpf(c.numerator) / c.denominator
        value = acc * v
        # all coefficients are positive, so Σ|cₙ||x|^(2n-1) = |value|
        err = (3 * terms + 4) * ctx.eps * abs(value) + xr.err_bound * (1 + value * value) * 2
    result = HPReal(value, err, ctx).require_precision("tan_bernoulli")
    if not include_truncation:
        return result
    with ctx.activate():
        tail = _series_tail(abs(v) + xr.err_bound, terms)
    return HPReal(value, err + tail, ctx)


# =============================================================================
# Argument doubling
# =============================================================================

class TangentSeed(str, Enum):
    """Small-angle seed f₀ ≈ tan(x) fed into the doubling steps."""
    CUBIC = "cubic"    # x + x³/3
    LINEAR = "linear"  # x
    EXACT = "exact"    # library tangent


def _seed(v: mpf, seed: TangentSeed) -> tuple[mpf, mpf]:
    """Seed value and its derivative with respect to x."""
    if seed is TangentSeed.EXACT:
        t = mpmath.tan(v)
        return t, 1 + t * t
    if seed is TangentSeed.CUBIC:
        return v + v**3 / 3, 1 + v * v
    return v, mpf(1)


def tan_doubling(
    x: Argument,
    n: int,
    ctx: PrecisionContext,
    seed: TangentSeed = TangentSeed.CUBIC,
    include_truncation: bool = False,
) -> HPReal:
    """fₙ(x) ≈ tan(2ⁿx) from seed f₀ and n double-angle steps.

    With the cubic seed f₁ = 2s/(1-s²), s = x + x³/3, exactly as the doubling
    chain defines it. The error bound tracks rounding through the chain; the
    seed's own deviation from tan(x) is reported by ``seed_truncation_bound``
    and folded in when ``include_truncation`` is set. The u1 chain wants fₙ
    itself, so it leaves the flag off.
    """
    if n < 0:
        raise DomainError(f"doubling count must be >= 0, got {n}")
    seed = TangentSeed(seed)
    xr = as_hp(x, ctx)
    with ctx.activate():
        v = xr.value
        if seed is TangentSeed.EXACT and abs(v) + xr.err_bound >= mpmath.pi / 2:
            raise DomainError(f"tan seed argument {mpmath.nstr(v, 10)} is past π/2")
        f, slope = _seed(v, seed)
        err = xr.err_bound * slope * (1 + ctx.eps) + 3 * ctx.eps * abs(f)
        floor = mpf(10) ** (-ctx.digits)

        for step in range(n):
            af = abs(f)
            den = abs(1 - f * f)
            margin = den - (2 * af + err) * err
            if den < floor or margin <= den / 2:
                raise PoleProximityError(
                    f"tan_doubling: |1 - f²| = {mpmath.nstr(den, 5)} at step {step + 1} of {n} "
                    f"is below the precision floor"
                )
            f = 2 * f / (1 - f * f)
            err = err * 2 * (1 + (af + err) ** 2) / (margin * margin) + 4 * ctx.eps * abs(f)

    logger.debug("tan_doubling: %d steps, seed=%s, err=%s", n, seed.value, mpmath.nstr(err, 3))
    result = HPReal(f, err, ctx).require_precision("tan_doubling")
    if not include_truncation or seed is TangentSeed.EXACT:
        return result
    return HPReal(f, err + seed_truncation_bound(xr, n, ctx, seed), ctx)


def seed_truncation_bound(
    x: Argument,
    n: int,
    ctx: PrecisionContext,
    seed: TangentSeed = TangentSeed.CUBIC,
) -> mpf:
    """Bound on |fₙ(x) - tan(2ⁿx)| caused by the seed alone.

    fₙ = tan(2ⁿ·arctan f₀) exactly, and |arctan f₀ - x| <= |f₀ - tan x| <= δ, so the
    mean value theorem gives 2ⁿ·δ·sec² over the final angle interval.
    """
    seed = TangentSeed(seed)
    if seed is TangentSeed.EXACT:
        return mpf(0)
    xr = as_hp(x, ctx)
    with ctx.activate():
        y = abs(xr.value)
        if y == 0:
            return mpf(0)
        r = (2 * y / mpmath.pi) ** 2
        first_dropped = 3 if seed is TangentSeed.CUBIC else 2
        delta = TANGENT_COEFFICIENT_BOUND / y * r**first_dropped / (1 - r)
        spread = mpmath.ldexp(delta, n)
        angle = mpmath.ldexp(y, n)
        if angle + spread >= mpmath.pi / 2:
            raise PoleProximityError("seed error interval reaches a tangent pole")
        worst = mpmath.tan(angle + spread)
        return spread * (1 + worst * worst)
