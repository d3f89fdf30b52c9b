"""
Quadratically convergent π iteration.

    θₙ₊₁ = 1/(1/θₙ + (1 - tan(2^(k-1)/θₙ))/2ᵏ),    θ₀ = 2ᵏ,    π = lim 2^(k+1)/θₙ

Correct digits roughly double per step, so step n runs at 2^(n+1) + 10 digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath

from machin_forge.errors import DomainError, PrecisionExhaustedError
from machin_forge.log import get_logger
from machin_forge.models import QuadRow
from machin_forge.numerics import (
    HPReal,
    PrecisionContext,
    TangentSeed,
    as_hp,
    reference_pi,
    tan_doubling,
)

logger = get_logger("quadratic")

# listings show 25 significant digits from the very first step
MIN_STEP_DIGITS = 40
ITERATE_DIGITS = 25
# steps past ⌈log₂ digits⌉ before auto mode gives up
AUTO_EXTRA_STEPS = 4


def auto_iterations(digits: int) -> int:
    """Step cap for auto mode; a stall raises instead of scheduling ever wider steps."""
    return math.ceil(math.log2(max(digits, 1))) + AUTO_EXTRA_STEPS


def step_context(n: int, k: int) -> PrecisionContext:
    """Context for producing θₙ: at least 2^(n+1) + 10 digits, plus a doubling guard."""
    return PrecisionContext.for_doublings(max(2 ** (n + 1) + 10, MIN_STEP_DIGITS), max(k - 1, 0))


@dataclass(frozen=True)
class QuadState:
    k: int
    theta: HPReal
    n: int
    ctx: PrecisionContext

    @classmethod
    def initial(cls, k: int) -> "QuadState":
        if k < 1:
            raise DomainError(f"quadratic iteration needs k >= 1, got {k}")
        ctx = step_context(0, k)
        return cls(k=k, theta=as_hp(2**k, ctx), n=0, ctx=ctx)

    @property
    def pi_estimate(self) -> HPReal:
        """2^(k+1)/θₙ."""
        return (1 / self.theta).scaled(self.k + 1)


def quad_step(s: QuadState) -> QuadState:
    """θₙ -> θₙ₊₁ at the precision scheduled for step n+1."""
    n, k = s.n + 1, s.k
    ctx = step_context(n, k)
    # the iteration is self-correcting: the previous iterate is an exact starting point
    theta = HPReal(s.theta.value, mpmath.mpf(0), ctx)
    if theta.sign() <= 0:
        raise DomainError("theta must stay positive")
    inv = 1 / theta
    t = tan_doubling(inv, k - 1, ctx, seed=TangentSeed.EXACT)
    nxt = 1 / (inv + (1 - t).scaled(-k))
    logger.debug("quadratic step %d (k=%d) at %s", n, k, ctx)
    return QuadState(k=k, theta=nxt, n=n, ctx=ctx)


def quad_states(k: int, iterations: int) -> list[QuadState]:
    """θ₁..θ_iterations."""
    if iterations < 1:
        raise DomainError(f"iterations must be >= 1, got {iterations}")
    state = QuadState.initial(k)
    states = []
    for _ in range(iterations):
        state = quad_step(state)
        states.append(state)
    return states


def pi_quadratic(k: int, iterations: int) -> HPReal:
    """2^(k+1)/θₙ after ``iterations`` steps."""
    return quad_states(k, iterations)[-1].pi_estimate


def correct_digits(approx: HPReal, reference: HPReal) -> int:
    """⌊-log10|approx - reference|⌋, clamped at 0."""
    if reference.ctx.working <= approx.ctx.working:
        raise PrecisionExhaustedError(
            f"reference at {reference.ctx} is too coarse to grade a value at {approx.ctx}"
        )
    with reference.ctx.activate():
        diff = abs(approx.value - reference.value)
        if diff == 0:
            return approx.ctx.digits
        return max(0, int(mpmath.floor(-mpmath.log10(diff))))


def format_iterate(x: HPReal, significant: int = ITERATE_DIGITS) -> str:
    with x.ctx.activate():
        return mpmath.nstr(x.value, significant, strip_zeros=False)


def _row(state: QuadState, reference: HPReal) -> QuadRow:
    estimate = state.pi_estimate
    return QuadRow(
        n=state.n,
        precision=state.ctx.working,
        digits=correct_digits(estimate, reference),
        iterate=format_iterate(estimate),
    )


def quad_trace(k: int, iterations: int, reference: Optional[HPReal] = None) -> list[QuadRow]:
    """One row per step: n, working precision, correct digits, 25-digit iterate."""
    states = quad_states(k, iterations)
    if reference is None:
        reference = reference_pi(states[-1].ctx.widened(extra_digits=20))
    return [_row(state, reference) for state in states]


def quad_pi_digits(
    k: int, digits: int, iterations: Optional[int] = None
) -> tuple[str, list[QuadRow]]:
    """π truncated to ``digits`` decimals from the quadratic iteration, plus its trace.

    Without ``iterations`` the iteration runs until the truncated estimate matches the
    reference, for at most ``auto_iterations(digits)`` steps. With it, too few steps is
    an error rather than wrong digits.
    """
    if digits < 1:
        raise DomainError(f"digits must be >= 1, got {digits}")
    state = QuadState.initial(k)
    rows: list[QuadRow] = []
    for _ in range(iterations if iterations is not None else auto_iterations(digits)):
        state = quad_step(state)
        extra = max(20, digits - state.ctx.digits + 20)
        reference = reference_pi(state.ctx.widened(extra_digits=extra))
        rows.append(_row(state, reference))
        text = state.pi_estimate.fixed(digits)
        if text == reference.fixed(digits) and (iterations is None or state.n == iterations):
            return text, rows
    raise PrecisionExhaustedError(
        f"{len(rows)} quadratic steps give {rows[-1].digits} correct digits; "
        f"{digits} requested"
    )
