"""
Unit tests for the numerics layer: rationals, error-tracked reals and kernels.
"""

import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import mpmath
import pytest

from machin_forge.errors import DomainError, PoleProximityError, PrecisionExhaustedError
from machin_forge.numerics import (
    HPReal,
    PrecisionContext,
    SeriesKind,
    TangentSeed,
    arctan,
    arctan_euler,
    arctan_gh,
    arctan_maclaurin,
    as_hp,
    as_rational,
    bernoulli,
    log10_abs,
    reference_pi,
    seed_truncation_bound,
    sqrt_hp,
    tan_bernoulli,
    tan_doubling,
    tangent_coefficients,
    tangent_terms_for,
    working_precision,
)

CTX30 = PrecisionContext(digits=30)
CTX50 = PrecisionContext(digits=50)


class TestRationals:
    """Test exact rational parsing and canonical form."""

    def test_canonical_form(self):
        rng = random.Random(7)
        for _ in range(50):
            p, q = rng.randint(-10**6, 10**6), rng.randint(1, 10**6)
            g = rng.choice([-1, 1]) * rng.randint(1, 10**4)
            scaled = Fraction(p * g, q * g)
            assert scaled == Fraction(p, q)
            assert scaled.denominator > 0
            assert (scaled.numerator, scaled.denominator) == (
                Fraction(p, q).numerator,
                Fraction(p, q).denominator,
            )

    def test_parse_forms(self):
        assert as_rational(5) == 5
        assert as_rational("-239/1") == -239
        assert as_rational({"num": "6", "den": "-4"}) == Fraction(-3, 2)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            as_rational(True)
        with pytest.raises(DomainError):
            as_rational({"num": "1", "den": "0"})
        with pytest.raises(DomainError):
            as_rational("seven")


class TestPrecisionContext:
    """Test precision contexts."""

    def test_defaults(self):
        ctx = PrecisionContext()
        assert ctx.digits == 50
        assert ctx.working == 60

    def test_rejects_zero_digits(self):
        with pytest.raises(ValueError):
            PrecisionContext(digits=0)

    def test_doubling_guard_grows(self):
        assert PrecisionContext.guard_for_doublings(9) == 14
        assert PrecisionContext.guard_for_doublings(100) > PrecisionContext.guard_for_doublings(10)

    def test_widened_and_doubled(self):
        ctx = PrecisionContext(digits=20, guard=5)
        assert ctx.widened(extra_digits=3, extra_guard=1).working == 29
        assert ctx.doubled().digits == 40


class TestHPReal:
    """Test error propagation of HPReal arithmetic."""

    def test_error_bound_is_sound(self):
        rng = random.Random(11)
        low, high = PrecisionContext(digits=20), PrecisionContext(digits=60)
        for _ in range(40):
            a = Fraction(rng.randint(1, 10**9), rng.randint(1, 10**9))
            b = Fraction(rng.randint(1, 10**9), rng.randint(1, 10**9))
            coarse = as_hp(a, low) * as_hp(b, low) + as_hp(a, low) / as_hp(b, low) - as_hp(b, low)
            fine = as_hp(a, high) * as_hp(b, high) + as_hp(a, high) / as_hp(b, high) - b
            with high.activate():
                assert abs(coarse.value - fine.value) <= coarse.err_bound + fine.err_bound

    def test_integers_are_exact(self):
        x = as_hp(12345, CTX30)
        assert x.err_bound == 0

    def test_uncertain_sign(self):
        with CTX50.activate():
            x = HPReal(mpmath.mpf("1e-40"), mpmath.mpf("1e-30"), CTX50)
        assert x.sign() == 0
        assert as_hp(-3, CTX50).sign() == -1

    def test_division_by_indistinguishable_zero(self):
        with CTX30.activate():
            tiny = HPReal(mpmath.mpf("1e-40"), mpmath.mpf("1e-35"), CTX30)
        with pytest.raises(PrecisionExhaustedError):
            1 / tiny

    def test_fixed_truncates(self):
        assert HPReal.from_string("3.14159", CTX30).fixed(3) == "3.141"
        assert HPReal.from_string("-2.5", CTX30).fixed(0) == "-2"
        assert HPReal.from_string("0.0299", CTX30).fixed(2) == "0.02"

    def test_subtraction_keeps_precision(self):
        ctx = PrecisionContext(digits=40)
        diff = 1 - as_hp(Fraction(1, 3), ctx)
        assert diff.err_bound < mpmath.mpf(10) ** -40
        with working_precision(80):
            assert abs(diff.value - mpmath.mpf(2) / 3) <= diff.err_bound

    def test_negation_and_abs_are_exact(self):
        x = as_hp(Fraction(-2, 7), CTX50)
        with working_precision(100):
            assert (-x).value + x.value == 0
            assert abs(x).value + x.value == 0
            assert (-x).err_bound == x.err_bound

    def test_scaled_is_exact(self):
        x = as_hp(Fraction(3, 7), CTX30)
        with CTX30.activate():
            assert x.scaled(5).value == x.value * 32
            assert x.scaled(5).err_bound == x.err_bound * 32


class TestSqrt:
    """Test sqrt_hp."""

    def test_zero(self):
        assert sqrt_hp(0, CTX30).value == 0

    def test_perfect_square_is_exact(self):
        root = sqrt_hp(16, CTX30)
        assert root.value == 4
        assert root.err_bound == 0

    def test_sqrt_two(self):
        assert sqrt_hp(2, CTX30).fixed(29) == "1.41421356237309504880168872420"

    def test_negative(self):
        with pytest.raises(DomainError):
            sqrt_hp(-1, CTX30)


class TestArctanSeries:
    """Test the three arctangent kernels."""

    def test_zero(self):
        assert arctan_maclaurin(0, CTX30).value == 0
        assert arctan_euler(0, CTX30).value == 0

    def test_one_fifth(self):
        value = arctan_maclaurin(Fraction(1, 5), CTX30)
        assert value.fixed(29) == "0.19739555984988075837004976519"

    def test_one_over_239(self):
        value = arctan_euler(Fraction(1, 239), CTX30)
        with working_precision(60):
            expected = mpmath.atan(mpmath.mpf(1) / 239)
            assert abs(value.value - expected) <= value.err_bound
        assert value.fixed(29) == "0.00418407600207472386453821495"

    def test_maclaurin_domain(self):
        with pytest.raises(DomainError):
            arctan_maclaurin(1, CTX30)

    def test_euler_at_one(self):
        value = arctan_euler(1, CTX30)
        with CTX30.activate():
            assert abs(value.value - mpmath.pi / 4) <= value.err_bound + mpmath.mpf("1e-30")

    def test_gh_domain_and_symmetry(self):
        with pytest.raises(DomainError):
            arctan_gh(0, CTX30)
        positive = arctan_gh(Fraction(1, 5), CTX30)
        negative = arctan_gh(Fraction(-1, 5), CTX30)
        assert negative.agrees_with(-positive)

    def test_dispatch(self):
        x = Fraction(2, 9)
        assert arctan(x, CTX30, SeriesKind.GH).agrees_with(arctan_gh(x, CTX30))

    def test_series_agree(self):
        rng = random.Random(3)
        for _ in range(100):
            x = Fraction(rng.choice([-1, 1]) * rng.randint(1, 500), 1000)
            values = [arctan(x, CTX50, kind) for kind in SeriesKind]
            with CTX50.activate():
                exact = mpmath.atan(mpmath.mpf(x.numerator) / x.denominator)
                for v in values:
                    assert abs(v.value - exact) <= v.err_bound + mpmath.mpf(10) ** -55
            assert values[0].agrees_with(values[1])
            assert values[1].agrees_with(values[2])


class TestBernoulli:
    """Test Bernoulli numbers and tangent coefficients."""

    def test_small_values(self):
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli(2) == Fraction(1, 6)
        assert bernoulli(4) == Fraction(-1, 30)
        assert bernoulli(12) == Fraction(-691, 2730)

    def test_odd_values_vanish(self):
        for n in range(1, 11):
            assert bernoulli(2 * n + 1) == 0

    def test_memoized(self):
        bernoulli(20)
        hits = bernoulli.cache_info().hits
        bernoulli(20)
        assert bernoulli.cache_info().hits == hits + 1

    def test_negative_index(self):
        with pytest.raises(DomainError):
            bernoulli(-1)

    def test_tangent_coefficients(self):
        assert tangent_coefficients(4) == (
            Fraction(1), Fraction(1, 3), Fraction(2, 15), Fraction(17, 315)
        )


class TestTangent:
    """Test the tangent evaluators."""

    def test_tan_bernoulli_zero(self):
        assert tan_bernoulli(0, 8, CTX30).value == 0

    def test_tan_bernoulli_eight_terms(self):
        value = tan_bernoulli(Fraction(1, 10), 8, CTX30)
        with CTX30.activate():
            assert abs(value.value - mpmath.mpf("0.10033467208545054505808004578")) < mpmath.mpf(
                "1e-19"
            )

    def test_tan_bernoulli_enough_terms(self):
        value = tan_bernoulli(Fraction(1, 10), 15, CTX30)
        with CTX30.activate():
            assert abs(value.value - mpmath.tan(mpmath.mpf(1) / 10)) < mpmath.mpf("1e-29")

    def test_tan_bernoulli_truncation_bound(self):
        value = tan_bernoulli(Fraction(1, 10), 8, CTX30, include_truncation=True)
        with CTX30.activate():
            exact = mpmath.tan(mpmath.mpf(1) / 10)
            assert abs(value.value - exact) <= value.err_bound
            assert value.err_bound < mpmath.mpf("1e-19")

    def test_tan_bernoulli_domain(self):
        with pytest.raises(DomainError):
            tan_bernoulli(2, 8, CTX30)

    def test_terms_needed(self):
        assert tangent_terms_for(0, CTX30) == 1
        assert tangent_terms_for(0.5, CTX30) < tangent_terms_for(1.2, CTX30)
        with pytest.raises(DomainError):
            tangent_terms_for(2, CTX30)

    def test_doubling_zero(self):
        assert tan_doubling(0, 5, CTX30).value == 0

    def test_doubling_reaches_pi_over_four(self):
        x = reference_pi(CTX30).scaled(-4)
        value = tan_doubling(x, 2, CTX30, seed=TangentSeed.EXACT)
        assert value.agrees_with(1)

    def test_doubling_cubic_seed_with_truncation(self):
        x = reference_pi(CTX30).scaled(-4)
        assert not tan_doubling(x, 2, CTX30).agrees_with(1)
        assert tan_doubling(x, 2, CTX30, include_truncation=True).agrees_with(1)

    def test_doubling_no_steps_returns_seed(self):
        x = Fraction(1, 10)
        with CTX30.activate():
            seed = mpmath.mpf(1) / 10 + (mpmath.mpf(1) / 10) ** 3 / 3
        assert tan_doubling(x, 0, CTX30).agrees_with(HPReal.from_mpf(seed, CTX30))

    def test_doubling_pole(self):
        x = reference_pi(CTX30).scaled(-2)
        with pytest.raises(PoleProximityError):
            tan_doubling(x, 1, CTX30, seed=TangentSeed.EXACT)

    def test_doubling_negative_steps(self):
        with pytest.raises(DomainError):
            tan_doubling(Fraction(1, 10), -1, CTX30)

    def test_exact_seed_has_no_truncation(self):
        assert seed_truncation_bound(Fraction(1, 100), 4, CTX30, TangentSeed.EXACT) == 0

    def test_doubling_matches_series(self):
        rng = random.Random(5)
        for _ in range(25):
            x = Fraction(rng.choice([-1, 1]) * rng.randint(1, 100), 10_000)
            n = rng.randint(1, 6)
            doubled = tan_doubling(x, n, CTX30)
            terms = tangent_terms_for(x * 2**n, CTX30)
            direct = tan_bernoulli(x * 2**n, terms, CTX30)
            slack = seed_truncation_bound(x, n, CTX30)
            assert doubled.agrees_with(direct, slack=slack)


class TestConcurrency:
    """Kernels called from worker threads match serial results."""

    def test_arctan_mixed_precision(self):
        jobs = [
            (Fraction(1, b), PrecisionContext(digits=digits))
            for b in (5, 7, 239, 651)
            for digits in (20, 45, 90)
        ] * 5

        def run(job):
            x, ctx = job
            return arctan_euler(x, ctx).fixed(ctx.digits)

        serial = [run(job) for job in jobs]
        with ThreadPoolExecutor(max_workers=8) as pool:
            assert list(pool.map(run, jobs)) == serial

    def test_bernoulli_memo(self):
        indices = list(range(0, 61, 2)) * 4
        bernoulli.cache_clear()
        with ThreadPoolExecutor(max_workers=8) as pool:
            parallel = list(pool.map(bernoulli, indices))
        bernoulli.cache_clear()
        assert parallel == [bernoulli(n) for n in indices]
        assert bernoulli(12) == Fraction(-691, 2730)


class TestLog10:
    """Test log10_abs."""

    def test_powers_of_ten(self):
        assert log10_abs(100, CTX30).agrees_with(2)
        assert log10_abs(Fraction(1, 1000), CTX30).agrees_with(-3)

    def test_u1_of_index_27(self):
        value = log10_abs(85445659, PrecisionContext(digits=20))
        with working_precision(40):
            assert abs(value.value - mpmath.log10(85445659)) < mpmath.mpf("1e-19")

    def test_huge_integer(self):
        value = log10_abs(10**5000 + 1, CTX30)
        with CTX30.activate():
            assert abs(value.value - 5000) < mpmath.mpf("1e-20")

    def test_negative_rational(self):
        assert log10_abs(Fraction(-1000, 10), CTX30).agrees_with(2)

    def test_zero(self):
        with pytest.raises(DomainError):
            log10_abs(0, CTX30)
