"""
Shared fixtures for machin-forge tests.
"""

import mpmath
import pytest

from machin_forge.numerics import working_precision


# u1 for k = 2..30, from the nested-radical definition
U1_VALUES = [
    2, 5, 10, 20, 40, 81, 162, 325, 651, 1303, 2607, 5215, 10430, 20860, 41721,
    83443, 166886, 333772, 667544, 1335088, 2670176, 5340353, 10680707, 21361414,
    42722829, 85445659, 170891318, 341782637, 683565275,
]


@pytest.fixture(scope="session")
def u1_table():
    """k -> u1 for k = 2..30."""
    return dict(enumerate(U1_VALUES, start=2))


def _pi_text(places: int) -> str:
    with working_precision(places + 30):
        scaled = int(mpmath.floor(mpmath.pi * mpmath.mpf(10) ** places))
    digits = str(scaled)
    return f"{digits[0]}.{digits[1:]}"


@pytest.fixture(scope="session")
def pi_text():
    """π truncated to the given number of decimals, straight from mpmath."""
    return _pi_text
