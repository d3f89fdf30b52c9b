"""
Exception hierarchy for machin-forge.

Every error raised by the library derives from ``MachinError``. Subclasses also
inherit the builtin exception that matches their meaning, so callers that only
know about ``ValueError`` or ``ArithmeticError`` still catch them.
"""

from __future__ import annotations

from typing import Any, Optional


class MachinError(Exception):
    """Base class for all machin-forge errors."""


# =============================================================================
# Input / domain errors
# =============================================================================

class DomainError(MachinError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateAngleError(DomainError):
    """The companion angle vanishes (tau == 1), so u2 / beta2 is undefined."""


class MaterializationCapError(DomainError):
    """Exact u2 requested above the configured k cap without forcing."""

    def __init__(self, k: int, cap: int):
        self.k = k
        self.cap = cap
        super().__init__(
            f"Exact u2 for k={k} exceeds the materialization cap k<={cap}; "
            f"numerator size grows like 8*2^(k-3) digits. Pass force=True to insist."
        )


class FormulaFormatError(MachinError, ValueError):
    """Malformed formula document or sidecar digest mismatch."""


# =============================================================================
# Numerical errors
# =============================================================================

class PrecisionExhaustedError(MachinError, ArithmeticError):
    """The error bound cannot be brought under the requested tolerance."""


class PoleProximityError(PrecisionExhaustedError):
    """A tangent evaluation came too close to a pole for the working precision."""


class FloorAmbiguityError(MachinError, ArithmeticError):
    """A value sits too close to an integer to certify its floor."""

    def __init__(self, value: Any, err_bound: Any, escalations: int = 0):
        self.value = value
        self.err_bound = err_bound
        self.escalations = escalations
        super().__init__(
            f"Cannot certify floor of {value} (error bound {err_bound}) "
            f"after {escalations} precision escalation(s)"
        )


class DivergenceError(MachinError, ArithmeticError):
    """Fixed-point iteration did not settle within its iteration cap."""


class ConsistencyError(MachinError, RuntimeError):
    """An internal cross-check failed, e.g. the doubling inequality of the u1 chain."""

    def __init__(self, message: str, k: Optional[int] = None):
        self.k = k
        super().__init__(message if k is None else f"k={k}: {message}")
