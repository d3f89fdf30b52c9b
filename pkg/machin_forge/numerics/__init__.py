"""
Exact and high-precision numerics: rationals, error-tracked reals and the
transcendental kernels (sqrt, arctan series, tangent evaluators, log10).
"""

from machin_forge.numerics.precision import (
    BigRational,
    HPReal,
    PrecisionContext,
    as_hp,
    as_rational,
    log10_abs,
    reference_pi,
    sqrt_hp,
    working_precision,
)
from machin_forge.numerics.series import (
    SeriesKind,
    arctan,
    arctan_euler,
    arctan_gh,
    arctan_maclaurin,
)
from machin_forge.numerics.tangent import (
    TangentSeed,
    bernoulli,
    seed_truncation_bound,
    tan_bernoulli,
    tan_doubling,
    tangent_coefficients,
    tangent_terms_for,
)

__all__ = [
    "BigRational",
    "HPReal",
    "PrecisionContext",
    "as_hp",
    "as_rational",
    "log10_abs",
    "reference_pi",
    "sqrt_hp",
    "working_precision",
    "SeriesKind",
    "arctan",
    "arctan_euler",
    "arctan_gh",
    "arctan_maclaurin",
    "TangentSeed",
    "bernoulli",
    "seed_truncation_bound",
    "tan_bernoulli",
    "tan_doubling",
    "tangent_coefficients",
    "tangent_terms_for",
]
