"""
Surd-free computation of the first constant u1.

Two routes avoid nested radicals entirely:

* ``fixed_point_u1`` iterates u <- 1/(1/u + (1 - tan(2^(k-1)/u))/2^k), whose fixed
  point is 2^(k+1)/π, and leaves the flooring to the caller.
* ``u1_chain`` walks the doubling recurrence
  u(k+1) = floor(2 / (1/u(k) + (1 - tan(2^(k-1)/u(k)))/2^k)) from u(2) = 2.

Floors go through ``safe_floor``, which refuses to answer when the error bound
straddles an integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import partial
from typing import Callable, Optional, Union

import mpmath

from machin_forge.errors import ConsistencyError, DivergenceError, DomainError, FloorAmbiguityError
from machin_forge.log import get_logger
from machin_forge.numerics import (
    HPReal,
    PrecisionContext,
    TangentSeed,
    arctan_euler,
    as_hp,
    tan_doubling,
)

logger = get_logger("solver")

DEFAULT_MAX_ITERATIONS = 64
DEFAULT_MAX_ESCALATIONS = 4


# =============================================================================
# Certified floor
# =============================================================================

def safe_floor(x: HPReal) -> int:
    """⌊x⌋, provided x is farther than 2·err_bound from every integer."""
    with x.ctx.activate():
        nearest = mpmath.nint(x.value)
        if abs(x.value - nearest) <= 2 * x.err_bound:
            raise FloorAmbiguityError(x.nstr(min(x.ctx.digits, 25)), mpmath.nstr(x.err_bound, 3))
        return int(mpmath.floor(x.value))


def floor_with_escalation(
    evaluate: Callable[[PrecisionContext], HPReal],
    ctx: PrecisionContext,
    max_escalations: int = DEFAULT_MAX_ESCALATIONS,
) -> int:
    """Floor ``evaluate(ctx)``, doubling the digits on each ambiguity."""
    current = ctx
    for attempt in range(max_escalations + 1):
        try:
            return safe_floor(evaluate(current))
        except FloorAmbiguityError as e:
            if attempt == max_escalations:
                raise FloorAmbiguityError(e.value, e.err_bound, escalations=max_escalations) from e
            current = current.doubled()
            logger.warning("floor of %s is ambiguous; retrying at %s", e.value, current)
    raise AssertionError("unreachable")


# =============================================================================
# Fixed-point iteration
# =============================================================================

class FixedPointVariant(str, Enum):
    """Update rule for the fixed-point iteration."""
    TANGENT = "tangent"  # u <- 1/(1/u + (1 - t)/2^k)
    ARCTAN = "arctan"    # u <- 1/(arctan(1/u) + arctan((1 - t)/(1 + t²))/2^(k-1))


@dataclass(frozen=True)
class SolverState:
    k: int
    estimate: HPReal
    ctx: PrecisionContext
    iterations: int = 0


def default_guess(k: int) -> int:
    """⌊2^(k+1)/3.14159⌋, inside the observed basin of attraction."""
    return math.floor(Fraction(2 ** (k + 1)) / Fraction("3.14159"))


def _iteration_context(k: int, ctx: PrecisionContext) -> PrecisionContext:
    # tan(2^(k-1)/u) goes through k-1 doublings
    return ctx.widened(extra_guard=math.ceil((k - 1) * math.log10(2)) + 2)


def fixed_point_step(
    state: SolverState, variant: FixedPointVariant = FixedPointVariant.TANGENT
) -> SolverState:
    """One update.

    The incoming estimate is treated as exact, so err_bound is this step's rounding.
    """
    k, ctx = state.k, state.ctx
    u = HPReal(state.estimate.value, mpmath.mpf(0), ctx)
    inv = 1 / u
    t = tan_doubling(inv, k - 1, ctx, seed=TangentSeed.EXACT)
    if FixedPointVariant(variant) is FixedPointVariant.TANGENT:
        denominator = inv + (1 - t).scaled(-k)
    else:
        correction = arctan_euler((1 - t) / (1 + t * t), ctx).scaled(-(k - 1))
        denominator = arctan_euler(inv, ctx) + correction
    if denominator.sign() <= 0:
        raise DivergenceError(f"fixed-point iterate left the positive axis at k={k}")
    return replace(state, estimate=1 / denominator, iterations=state.iterations + 1)


def _start(
    k: int, guess: Union[int, Fraction, float, HPReal, None], ctx: PrecisionContext
) -> SolverState:
    if k < 2:
        raise DomainError(f"fixed-point iteration needs k >= 2, got {k}")
    work = _iteration_context(k, ctx)
    estimate = as_hp(default_guess(k) if guess is None else guess, work)
    if estimate.sign() <= 0:
        raise DomainError("initial guess must be positive")
    return SolverState(k=k, estimate=estimate, ctx=work)


def fixed_point_trace(
    k: int,
    guess: Union[int, Fraction, float, None] = None,
    iterations: int = 5,
    ctx: Optional[PrecisionContext] = None,
    variant: FixedPointVariant = FixedPointVariant.TANGENT,
) -> list[HPReal]:
    """The first ``iterations`` iterates, without any stopping rule."""
    state = _start(k, guess, ctx or PrecisionContext())
    trace = []
    for _ in range(iterations):
        state = fixed_point_step(state, variant)
        trace.append(state.estimate)
    return trace


def fixed_point_u1(
    k: int,
    guess: Union[int, Fraction, float, None] = None,
    ctx: Optional[PrecisionContext] = None,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    variant: FixedPointVariant = FixedPointVariant.TANGENT,
) -> HPReal:
    """Iterate until two successive iterates agree to ``ctx.digits``.

    The returned error bound is the last step's rounding plus the size of the last
    update, which dominates the distance to the fixed point under quadratic
    convergence.
    """
    ctx = ctx or PrecisionContext()
    state = _start(k, guess, ctx)
    previous = state.estimate
    while state.iterations < max_iterations:
        state = fixed_point_step(state, variant)
        current = state.estimate
        with state.ctx.activate():
            change = abs(current.value - previous.value)
            settled = change <= mpmath.mpf(10) ** (-ctx.digits) * abs(current.value)
        logger.debug("fixed point k=%d iteration %d: %s", k, state.iterations, current.nstr(20))
        if settled:
            return HPReal(current.value, current.err_bound + change, state.ctx)
        previous = current
    raise DivergenceError(
        f"fixed-point iteration for k={k} did not settle within {max_iterations} iterations"
    )


# =============================================================================
# Doubling recurrence
# =============================================================================

def chain_context(k: int, ctx: Optional[PrecisionContext] = None) -> PrecisionContext:
    """Working precision for chain step k: max(32, k + 16) digits, doubling guard."""
    digits = max(32, k + 16, ctx.digits if ctx else 0)
    return PrecisionContext.for_doublings(digits, max(k - 1, 0))


def _chain_value(u: int, k: int, ctx: PrecisionContext) -> HPReal:
    inv = Fraction(1, u)
    t = tan_doubling(inv, k - 1, ctx, seed=TangentSeed.CUBIC)
    return 2 / ((1 - t).scaled(-k) + inv)


def u1_chain(
    k_max: int,
    ctx: Optional[PrecisionContext] = None,
    max_escalations: int = DEFAULT_MAX_ESCALATIONS,
) -> list[int]:
    """[u(2), ..., u(k_max)] from the doubling recurrence, starting at u(2) = 2.

    Every step is checked against 2u(k) <= u(k+1) <= 2u(k) + 1.
    """
    if k_max < 2:
        raise DomainError(f"the chain starts at k=2, got k_max={k_max}")
    chain = [2]
    u = 2
    for k in range(2, k_max):
        step_ctx = chain_context(k, ctx)
        nxt = floor_with_escalation(partial(_chain_value, u, k), step_ctx, max_escalations)
        if not 2 * u <= nxt <= 2 * u + 1:
            raise ConsistencyError(
                f"doubling inequality violated: 2·{u} <= {nxt} <= 2·{u}+1 fails", k=k + 1
            )
        chain.append(nxt)
        u = nxt
        if (k + 1) % 100 == 0:
            logger.info("u1 chain reached k=%d (%d digits)", k + 1, len(str(u)))
        else:
            logger.debug("u1 chain k=%d: %d", k + 1, u)
    return chain


def u1_surdless(k: int, ctx: Optional[PrecisionContext] = None) -> int:
    """u(k) without any square roots."""
    return u1_chain(k, ctx)[-1]
