"""
Unit tests for the nested-radical ground truth.
"""

import mpmath
import pytest

from machin_forge.errors import DomainError
from machin_forge.numerics import PrecisionContext, working_precision
from machin_forge.radicals import (
    RadicalSequence,
    compare_u1,
    nested_radical,
    pi_radical_limit,
    u1_radical,
)

CTX = PrecisionContext(digits=40)


class TestNestedRadical:
    """Test aₖ = √(2 + aₖ₋₁)."""

    def test_base_cases(self):
        assert nested_radical(0, CTX).value == 0
        with working_precision(50):
            assert abs(nested_radical(1, CTX).value - mpmath.sqrt(2)) < mpmath.mpf("1e-40")

    def test_closed_form(self):
        value = nested_radical(12, CTX)
        with working_precision(60):
            assert abs(value.value - 2 * mpmath.cos(mpmath.pi / 2**13)) < mpmath.mpf("1e-40")

    def test_gap_at_depth_30(self):
        gap = RadicalSequence.build(30, CTX).gap(30)
        with working_precision(80):
            expected = 4 * mpmath.sin(mpmath.pi / 2**32) ** 2
            assert 1e-18 < float(gap.value) < 1e-17
            assert abs(gap.value - expected) < expected * mpmath.mpf("1e-25")

    def test_gap_shrinks_by_four(self):
        seq = RadicalSequence.build(30, CTX)
        for k in range(15, 31):
            ratio = float((seq.gap(k) / seq.gap(k - 1)).value)
            assert 0.2499 < ratio < 0.2501

    def test_negative_depth(self):
        with pytest.raises(DomainError):
            RadicalSequence.build(-1, CTX)


class TestU1Radical:
    """Test u1 = ⌊aₖ/√(2 - aₖ₋₁)⌋."""

    def test_known_values(self):
        assert u1_radical(1) == 1
        assert u1_radical(3) == 5
        assert u1_radical(6) == 40
        assert u1_radical(27) == 85445659

    def test_table(self, u1_table):
        for k, expected in u1_table.items():
            assert u1_radical(k, CTX) == expected

    def test_index_bounds(self, u1_table):
        # ⌊2^(k+1)/π⌋ - 1 <= u1 <= ⌊2^(k+1)/π⌋
        with working_precision(60):
            for k, value in u1_table.items():
                upper = int(mpmath.floor(mpmath.mpf(2) ** (k + 1) / mpmath.pi))
                assert upper - 1 <= value <= upper

    def test_first_term_approaches_quarter_pi(self, u1_table):
        with working_precision(60):
            gaps = [
                abs(mpmath.mpf(2) ** (k - 1) / u1_table[k] - mpmath.pi / 4)
                for k in range(5, 31)
            ]
            for k, gap in zip(range(5, 31), gaps):
                assert gap < mpmath.mpf(4) / u1_table[k]
            # u1 doubling exactly leaves 2^(k-1)/u1 unchanged
            assert all(b <= a for a, b in zip(gaps, gaps[1:]))
            assert gaps[-1] < gaps[0] / 10**6

    def test_zero_index(self):
        with pytest.raises(DomainError):
            u1_radical(0)


class TestPiRadicalLimit:
    """Test 2ᵏ·√(2 - aₖ₋₁) -> π."""

    def test_small_k(self):
        assert pi_radical_limit(2, CTX).nstr(8) == "3.0614675"
        assert pi_radical_limit(10, CTX).nstr(9) == "3.14159142"

    def test_close_to_pi(self):
        value = pi_radical_limit(30, CTX)
        with working_precision(60):
            assert abs(value.value - mpmath.pi) < mpmath.mpf("1e-17")

    def test_convergence_envelope(self):
        with working_precision(60):
            errors = [abs(pi_radical_limit(k, CTX).value - mpmath.pi) for k in range(2, 31)]
            for k, err in zip(range(2, 31), errors):
                assert err < mpmath.mpf(10) ** (-0.6 * k + 1)
        assert all(b < a for a, b in zip(errors, errors[1:]))

    def test_zero_index(self):
        with pytest.raises(DomainError):
            pi_radical_limit(0, CTX)


class TestCompareU1:
    """Test the recurrence-vs-radical table."""

    def test_all_rows_match(self, u1_table):
        rows = compare_u1(20, CTX)
        assert [row.k for row in rows] == list(range(2, 21))
        assert all(row.match for row in rows)
        assert [row.radical for row in rows] == [u1_table[k] for k in range(2, 21)]
