"""
Data models for machin-forge.

This module provides the structures shared by the library and the CLI:
- Machin-like formulas (generic and two-term) with their JSON shape
- Report rows for the u1 table, the quadratic iteration and benchmarks
- Enums for output format, u1 method and exit codes

Integers and rationals serialize as decimal strings so arbitrarily large values
survive any JSON parser.
"""

from __future__ import annotations

from enum import Enum, IntEnum
from fractions import Fraction
from typing import Any, List, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_serializer,
    field_validator,
)

from machin_forge.numerics import SeriesKind, as_rational


# =============================================================================
# Enums
# =============================================================================

class OutputFormat(str, Enum):
    """Format of command output on stdout."""
    TEXT = "text"
    JSON = "json"


class U1Method(str, Enum):
    """How the first constant is produced."""
    ITER = "iter"        # surd-free doubling recurrence
    RADICAL = "radical"  # nested radicals
    BOTH = "both"


class ExitCode(IntEnum):
    """Process exit codes of the CLI."""
    OK = 0
    INVALID = 1
    USAGE = 2
    PRECISION = 3
    INTERRUPTED = 130


def rational_payload(q: Fraction) -> dict[str, str]:
    return {"num": str(q.numerator), "den": str(q.denominator)}


def _parse_int(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError as e:
            raise ValueError(f"not an integer: {value[:40]!r}") from e
    return value


# =============================================================================
# Formulas
# =============================================================================

class Term(BaseModel):
    """One summand A·arctan(1/B) of a Machin-like formula."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: int
    b: Fraction

    @field_validator("a", mode="before")
    @classmethod
    def parse_coefficient(cls, v):
        return _parse_int(v)

    @field_validator("b", mode="before")
    @classmethod
    def parse_base(cls, v):
        return as_rational(v)

    @field_validator("a", "b")
    @classmethod
    def nonzero(cls, v):
        if v == 0:
            raise ValueError("coefficients and bases must be nonzero")
        return v

    @field_serializer("a", when_used="json")
    def dump_coefficient(self, a: int) -> str:
        return str(a)

    @field_serializer("b", when_used="json")
    def dump_base(self, b: Fraction) -> dict[str, str]:
        return rational_payload(b)

    def __str__(self) -> str:
        return f"{self.a}·arctan(1/{self.b})"


class MachinFormula(BaseModel):
    """π/4 = Σ Aⱼ·arctan(1/Bⱼ)."""

    model_config = ConfigDict(frozen=True)

    terms: List[Term] = Field(min_length=1)

    @classmethod
    def from_pairs(cls, pairs) -> "MachinFormula":
        return cls(terms=[Term(a=a, b=b) for a, b in pairs])

    def as_pairs(self) -> list[tuple[int, Fraction]]:
        return [(t.a, t.b) for t in self.terms]

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms)


class TwoTermFormula(BaseModel):
    """π/4 = 2^(k-1)·arctan(1/u1) + arctan(1/u2)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int = Field(ge=1)
    u1: int
    u2: Fraction

    @field_validator("k", "u1", mode="before")
    @classmethod
    def parse_integer(cls, v):
        return _parse_int(v)

    @field_validator("u2", mode="before")
    @classmethod
    def parse_u2(cls, v):
        return as_rational(v)

    @field_validator("u1", "u2")
    @classmethod
    def nonzero(cls, v):
        if v == 0:
            raise ValueError("u1 and u2 must be nonzero")
        return v

    @field_serializer("u1", when_used="json")
    def dump_u1(self, u1: int) -> str:
        return str(u1)

    @field_serializer("u2", when_used="json")
    def dump_u2(self, u2: Fraction) -> dict[str, str]:
        return rational_payload(u2)

    def to_machin(self) -> MachinFormula:
        return MachinFormula.from_pairs([(2 ** (self.k - 1), self.u1), (1, self.u2)])

    @property
    def u2_is_integer(self) -> bool:
        return self.u2.denominator == 1


# =============================================================================
# Report rows
# =============================================================================

class U1Row(BaseModel):
    """One row of the radical-vs-recurrence comparison."""
    k: int
    iterative: Optional[int] = None
    radical: Optional[int] = None

    @computed_field
    @property
    def match(self) -> Optional[bool]:
        if self.iterative is None or self.radical is None:
            return None
        return self.iterative == self.radical


class QuadRow(BaseModel):
    """One step of the quadratic π iteration."""
    n: int
    precision: int
    digits: int
    iterate: str


class BenchCell(BaseModel):
    """Timing of one (series, k) evaluation."""
    series: SeriesKind
    k: int
    digits: int
    millis: Optional[float] = None
    digest: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class LehmerReport(BaseModel):
    """Lehmer's measure plus the Euler-series digit yield of the slowest term."""
    mu: str
    terms: int
    digits_per_term: Optional[float] = None
    estimated: bool = False
