"""Extended-real arithmetic conventions."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iterhardy.extreal import (
    INF,
    conjugate_exponent,
    plus_part,
    rho_exponent,
    star_exponent,
    xdiv,
    xmul,
    xpow,
)


class TestXdiv:
    def test_zero_numerator_wins(self):
        assert xdiv(0.0, 0.0) == 0.0
        assert xdiv(0.0, INF) == 0.0
        assert xdiv(0.0, 3.0) == 0.0

    def test_infinite_denominator(self):
        assert xdiv(5.0, INF) == 0.0
        assert xdiv(INF, INF) == 0.0

    def test_zero_denominator(self):
        assert xdiv(2.0, 0.0) == INF
        assert xdiv(-2.0, 0.0) == -INF

    def test_ordinary(self):
        assert xdiv(6.0, 3.0) == 2.0


class TestXmul:
    def test_zero_annihilates_infinity(self):
        assert xmul(0.0, INF) == 0.0
        assert xmul(INF, 0.0) == 0.0

    def test_ordinary(self):
        assert xmul(2.0, 3.5) == 7.0
        assert xmul(INF, 2.0) == INF


class TestXpow:
    def test_zeroth_power_is_one(self):
        for a in (0.0, 1.0, 7.0, INF):
            assert xpow(a, 0.0) == 1.0

    def test_infinite_base(self):
        assert xpow(INF, 2.0) == INF
        assert xpow(INF, -2.0) == 0.0

    def test_zero_base(self):
        assert xpow(0.0, 2.0) == 0.0
        assert xpow(0.0, -2.0) == INF

    def test_ordinary(self):
        assert xpow(4.0, 0.5) == 2.0


def test_plus_part():
    assert plus_part(3.0) == 3.0
    assert plus_part(-3.0) == 0.0
    assert plus_part(0.0) == 0.0


class TestConjugate:
    def test_corners(self):
        assert conjugate_exponent(1.0) == INF
        assert conjugate_exponent(INF) == 1.0
        assert conjugate_exponent(2.0) == 2.0

    def test_below_one_rejected(self):
        with pytest.raises(ValueError):
            conjugate_exponent(0.5)

    @given(st.floats(min_value=1.0 + 1e-9, max_value=100.0))
    def test_holder_identity(self, p):
        pp = conjugate_exponent(p)
        assert math.isclose(1.0 / p + 1.0 / pp, 1.0, rel_tol=1e-12)


class TestStar:
    def test_corner(self):
        assert star_exponent(1.0) == INF

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            star_exponent(1.5)
        with pytest.raises(ValueError):
            star_exponent(0.0)

    @given(st.floats(min_value=1e-6, max_value=1.0 - 1e-9))
    def test_reciprocal_identity(self, p):
        # 1/p* = 1/p - 1
        assert math.isclose(1.0 / star_exponent(p), 1.0 / p - 1.0, rel_tol=1e-12)


class TestRho:
    def test_at_or_above_one(self):
        assert rho_exponent(1.0) == INF
        assert rho_exponent(2.0) == INF

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            rho_exponent(0.0)

    @given(st.floats(min_value=1e-6, max_value=1.0 - 1e-9))
    def test_reciprocal_identity(self, q):
        # 1/rho = (1/q - 1)_+
        assert math.isclose(1.0 / rho_exponent(q), 1.0 / q - 1.0, rel_tol=1e-12)
