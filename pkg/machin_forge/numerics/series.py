"""
Arctangent series kernels.

Three evaluations of arctan(x), all truncated at the first term whose magnitude
drops below 10^-(digits+guard):

- ``arctan_maclaurin``: the alternating Maclaurin series, |x| < 1 only.
- ``arctan_euler``: Euler's accelerated series, any finite x.
- ``arctan_gh``: the g/h recurrence series, x != 0.

Each returns an ``HPReal`` whose error bound covers the discarded tail, the
rounding accumulated over the summation, and the error already carried by x.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mpf

from machin_forge.errors import DomainError, PrecisionExhaustedError
from machin_forge.log import get_logger
from machin_forge.numerics.precision import HPReal, PrecisionContext, as_hp

logger = get_logger("numerics.series")

Argument = Union[HPReal, int, Fraction]

MAX_TERMS = 2_000_000


class SeriesKind(str, Enum):
    """Arctangent series used to evaluate a formula."""
    MACLAURIN = "maclaurin"
    EULER = "euler"
    GH = "gh"


def _threshold(ctx: PrecisionContext) -> mpf:
    return mpf(10) ** (-ctx.working)


def _too_many_terms(name: str, ctx: PrecisionContext) -> PrecisionExhaustedError:
    return PrecisionExhaustedError(
        f"{name}: no convergence to {ctx.working} digits within {MAX_TERMS} terms"
    )


def arctan_maclaurin(x: Argument, ctx: PrecisionContext) -> HPReal:
    """Σ (-1)^n x^(2n+1)/(2n+1); alternating-series tail bound."""
    xr = as_hp(x, ctx)
    with ctx.activate():
        v = xr.value
        if abs(v) + xr.err_bound >= 1:
            raise DomainError(f"arctan_maclaurin needs |x| < 1, got {mpmath.nstr(v, 10)}")
        if v == 0:
            return HPReal(mpf(0), xr.err_bound, ctx)

        threshold = _threshold(ctx)
        x2 = v * v
        power = v
        total = mpf(0)
        abs_sum = mpf(0)
        n = 0
        while True:
            term = power / (2 * n + 1)
            total += term
            abs_sum += abs(term)
            n += 1
            power = -power * x2
            tail = abs(power) / (2 * n + 1)
            if tail < threshold:
                break
            if n > MAX_TERMS:
                raise _too_many_terms("arctan_maclaurin", ctx)

        err = tail + 3 * (n + 2) * ctx.eps * abs_sum + xr.err_bound
    logger.debug("arctan_maclaurin: %d terms at %s", n, ctx)
    return HPReal(total, err, ctx).require_precision("arctan_maclaurin")


def arctan_euler(x: Argument, ctx: PrecisionContext) -> HPReal:
    """Σ 2^(2n)(n!)²/(2n+1)! · x^(2n+1)/(1+x²)^(n+1).

    Terms come from the ratio (2n+2)/(2n+3) · x²/(1+x²); no factorials. All terms
    share the sign of x and shrink at least geometrically, so the tail after the
    first omitted term t is below t·(1+x²).
    """
    xr = as_hp(x, ctx)
    with ctx.activate():
        v = xr.value
        if v == 0:
            return HPReal(mpf(0), xr.err_bound, ctx)

        threshold = _threshold(ctx)
        x2 = v * v
        one_plus = 1 + x2
        ratio = x2 / one_plus
        term = v / one_plus
        total = mpf(0)
        n = 0
        while abs(term) >= threshold:
            total += term
            term = term * ratio * (2 * n + 2) / (2 * n + 3)
            n += 1
            if n > MAX_TERMS:
                raise _too_many_terms("arctan_euler", ctx)

        tail = abs(term) * one_plus
        err = tail + 4 * (n + 2) * ctx.eps * abs(total) + xr.err_bound
    logger.debug("arctan_euler: %d terms at %s", n, ctx)
    return HPReal(total, err, ctx).require_precision("arctan_euler")


def arctan_gh(x: Argument, ctx: PrecisionContext) -> HPReal:
    """2·Σ 1/(2n-1) · gₙ/(gₙ²+hₙ²) with g₁ = 2/x, h₁ = 1.

    gₙ = gₙ₋₁(1 - 4/x²) + 4hₙ₋₁/x and hₙ = hₙ₋₁(1 - 4/x²) - 4gₙ₋₁/x, which makes
    gₙ + i·hₙ a geometric sequence with ratio of modulus 1 + 4/x². Truncation is
    decided on the modulus, since a single term can be small by cancellation.
    """
    xr = as_hp(x, ctx)
    with ctx.activate():
        v = xr.value
        if abs(v) <= xr.err_bound:
            raise DomainError("arctan_gh is undefined at x = 0 (g1 = 2/x)")

        threshold = _threshold(ctx)
        inv = 1 / v
        c = 1 - 4 * inv * inv
        d = 4 * inv
        growth = 1 + 4 * inv * inv
        contraction = 1 / growth
        g, h = 2 * inv, mpf(1)
        total = mpf(0)
        envelope_sum = mpf(0)
        n = 1
        while True:
            modulus_sq = g * g + h * h
            term = 2 * g / (modulus_sq * (2 * n - 1))
            total += term
            envelope_sum += 2 / ((2 * n - 1) * mpmath.sqrt(modulus_sq))
            g, h = c * g + d * h, c * h - d * g
            n += 1
            envelope = 2 / ((2 * n - 1) * mpmath.sqrt(g * g + h * h))
            if envelope < threshold:
                break
            if n > MAX_TERMS:
                raise _too_many_terms("arctan_gh", ctx)

        tail = envelope / (1 - contraction)
        err = tail + 6 * (n + 2) * ctx.eps * envelope_sum + xr.err_bound
    logger.debug("arctan_gh: %d terms at %s", n - 1, ctx)
    return HPReal(total, err, ctx).require_precision("arctan_gh")


ARCTAN_KERNELS = {
    SeriesKind.MACLAURIN: arctan_maclaurin,
    SeriesKind.EULER: arctan_euler,
    SeriesKind.GH: arctan_gh,
}


def arctan(x: Argument, ctx: PrecisionContext, series: SeriesKind = SeriesKind.EULER) -> HPReal:
    """Dispatch to the kernel named by ``series``."""
    return ARCTAN_KERNELS[SeriesKind(series)](x, ctx)
