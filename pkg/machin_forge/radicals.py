"""
Nested radicals aₖ = √(2 + aₖ₋₁), a₀ = 0, and the quantities built on them.

aₖ/√(2 - aₖ₋₁) equals cot(π/2^(k+1)), so its floor is the first constant u1 of
the two-term formula. This module is the surd-based ground truth the surd-free
solver is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional

import mpmath

from machin_forge.errors import DomainError, PrecisionExhaustedError
from machin_forge.models import U1Row
from machin_forge.numerics import HPReal, PrecisionContext, sqrt_hp
from machin_forge.solver import DEFAULT_MAX_ESCALATIONS, floor_with_escalation, u1_chain


@dataclass(frozen=True)
class RadicalSequence:
    """a₀..aₖ computed at a precision that keeps 2 - aₖ significant."""

    k: int
    values: tuple[HPReal, ...]
    ctx: PrecisionContext

    @classmethod
    def build(cls, k: int, ctx: PrecisionContext) -> "RadicalSequence":
        if k < 0:
            raise DomainError(f"radical depth must be >= 0, got {k}")
        # 2 - aₖ shrinks ~4x per level, losing ~0.6 digits each
        internal = ctx.widened(extra_digits=math.ceil(0.7 * k))
        values = [HPReal.zero(internal)]
        for _ in range(k):
            values.append(sqrt_hp(2 + values[-1], internal))
        return cls(k=k, values=tuple(values), ctx=internal)

    def __getitem__(self, n: int) -> HPReal:
        return self.values[n]

    def gap(self, n: int) -> HPReal:
        """2 - aₙ."""
        return 2 - self.values[n]


def nested_radical(k: int, ctx: PrecisionContext) -> HPReal:
    """aₖ, carrying enough digits that 2 - aₖ keeps ``ctx.digits`` significant digits."""
    seq = RadicalSequence.build(k, ctx)
    gap = seq.gap(k)
    with seq.ctx.activate():
        relative = gap.err_bound / abs(gap.value)
        if relative > mpmath.mpf(10) ** (-ctx.digits):
            raise PrecisionExhaustedError(
                f"nested_radical({k}): 2 - a_k keeps fewer than {ctx.digits} digits at {seq.ctx}"
            )
    return seq[k]


def _cotangent_ratio(k: int, ctx: PrecisionContext) -> HPReal:
    seq = RadicalSequence.build(k, ctx)
    return seq[k] / sqrt_hp(seq.gap(k - 1), seq.ctx)


def u1_radical(
    k: int,
    ctx: Optional[PrecisionContext] = None,
    max_escalations: int = DEFAULT_MAX_ESCALATIONS,
) -> int:
    """⌊aₖ/√(2 - aₖ₋₁)⌋ via the certified floor."""
    if k < 1:
        raise DomainError(f"u1 needs k >= 1, got {k}")
    if k == 1:
        # a₁/√2 is exactly 1
        return 1
    ctx = ctx or PrecisionContext()
    return floor_with_escalation(partial(_cotangent_ratio, k), ctx, max_escalations)


def pi_radical_limit(k: int, ctx: PrecisionContext) -> HPReal:
    """2ᵏ·√(2 - aₖ₋₁), which tends to π."""
    if k < 1:
        raise DomainError(f"pi_radical_limit needs k >= 1, got {k}")
    seq = RadicalSequence.build(k - 1, ctx)
    limit = sqrt_hp(seq.gap(k - 1), seq.ctx).scaled(k)
    return limit.with_context(ctx).require_precision("pi_radical_limit")


def compare_u1(k_max: int, ctx: Optional[PrecisionContext] = None) -> list[U1Row]:
    """Rows k = 2..k_max pairing the surd-free chain with the radical floor."""
    chain = u1_chain(k_max, ctx)
    return [
        U1Row(k=k, iterative=value, radical=u1_radical(k, ctx))
        for k, value in enumerate(chain, start=2)
    ]
