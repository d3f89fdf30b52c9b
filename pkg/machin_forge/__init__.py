"""
machin-forge: two-term Machin-like formulas for π.

Construct u1 without surds, derive the exact rational u2, verify arbitrary
Machin-like formulas exactly and compute π digits from them.
"""

__version__ = "0.1.0"

from machin_forge.errors import MachinError
from machin_forge.machin import (
    BUILTIN_FORMULAS,
    GaussianRational,
    build_two_term_formula,
    compute_pi,
    get_builtin,
    lehmer_measure,
    u2_exact,
    verify_formula,
)
from machin_forge.models import MachinFormula, TwoTermFormula
from machin_forge.numerics import HPReal, PrecisionContext
from machin_forge.quadratic import pi_quadratic
from machin_forge.radicals import u1_radical
from machin_forge.solver import u1_chain, u1_surdless

__all__ = [
    "__version__",
    "MachinError",
    "BUILTIN_FORMULAS",
    "GaussianRational",
    "build_two_term_formula",
    "compute_pi",
    "get_builtin",
    "lehmer_measure",
    "u2_exact",
    "verify_formula",
    "MachinFormula",
    "TwoTermFormula",
    "HPReal",
    "PrecisionContext",
    "pi_quadratic",
    "u1_radical",
    "u1_chain",
    "u1_surdless",
]
