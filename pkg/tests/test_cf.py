import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from horolab import cf


@given(st.fractions(min_value=0, max_value=50, max_denominator=10**6))
def test_fraction_digits_round_trip(x):
    assert cf.value(cf.digits_of_fraction(x)) == x


@given(st.integers(2, 200).filter(lambda d: math.isqrt(d) ** 2 != d))
def test_quadratic_digits_match_mpmath(D):
    digits = cf.digits_of_quadratic(0, D, 1, 25)
    with mpmath.workdps(80):
        assert digits == cf.digits_of_mpf(mpmath.sqrt(D), 25)


def test_sqrt2_digits():
    assert cf.digits_of_quadratic(0, 2, 1, 6) == [1, 2, 2, 2, 2, 2]
    assert cf.digits_of_quadratic(-1, 2, 1, 4) == [0, 2, 2, 2]


@given(st.lists(st.integers(1, 50), min_size=2, max_size=20))
def test_convergent_determinant(tail):
    digits = [0] + tail
    conv = list(cf.convergents(digits))
    for (p0, q0), (p1, q1) in zip(conv, conv[1:]):
        assert abs(p1 * q0 - p0 * q1) == 1
        assert q1 > q0 or q0 == 1


@given(st.lists(st.integers(1, 30), min_size=3, max_size=15))
def test_normalized_error_bounds(tail):
    digits = [0] + tail
    x = cf.value(digits)
    for j, (p, q) in enumerate(list(cf.convergents(digits))[:-1]):
        e = abs(x - Fraction(p, q)) * q * q
        # 1/(a_{j+1} + 2) <= q^2 |x - p/q| <= 1/a_{j+1}; equality only for terminating tails
        a = digits[j + 1]
        assert Fraction(1, a + 2) <= e <= Fraction(1, a)


def test_golden_liminf_two_routes():
    d = cf.liminf_from_digits(cf.golden_digits(60), q_min=1000, q_max=10**6)
    brute = min(v for _, _, v in cf.brute_force_q2(mpmath.phi, 10**5, q_min=1000))
    assert d == pytest.approx(1 / math.sqrt(5), abs=1e-3)
    assert brute == pytest.approx(1 / math.sqrt(5), abs=1e-3)


def test_brute_force_only_reports_convergent_like_hits():
    hits = cf.brute_force_q2(mpmath.sqrt(2), 10**4, threshold=0.5)
    conv = {(p, q) for p, q in cf.convergents(cf.digits_of_quadratic(0, 2, 1, 20))}
    assert hits and all((p, q) in conv for q, p, _ in hits)


def test_random_digits_seeded():
    a = cf.random_digits(np.random.default_rng(5), 30)
    b = cf.random_digits(np.random.default_rng(5), 30)
    assert a == b and a[0] == 0 and len(a) == 31 and min(a[1:]) >= 1


def test_liouville_has_huge_digits():
    d = cf.digits_of_fraction(cf.liouville_fraction())
    assert max(d) > 10**6
    assert cf.bad_constant_from_digits(d, 10**8) < 1e-3
