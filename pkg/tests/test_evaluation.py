from __future__ import annotations

from fractions import Fraction
from math import isqrt

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootsum.errors import BudgetExceededError
from rootsum.evaluation import (
    DyadicInterval,
    dist_to_int,
    dyadic_ceil,
    dyadic_floor,
    eval_enclosure,
    format_dyadic,
    frac_enclosure,
    nearest_integer,
    parse_dyadic,
    sign,
    sqrt_enclosure,
)
from rootsum.ring import QuadInt, QuadRat, make_basis

from .conftest import mp_dist, mp_value, quad_ints, quad_rats


def mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


class TestDyadic:
    def test_rejects_non_dyadic(self):
        with pytest.raises(ValueError):
            DyadicInterval(Fraction(1, 3), Fraction(1, 2))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DyadicInterval(Fraction(1), Fraction(0))

    @pytest.mark.parametrize(
        "x, text",
        [(Fraction(0), "0*2^0"), (Fraction(5, 8), "5*2^-3"), (Fraction(12), "3*2^2"), (Fraction(-3, 2), "-3*2^-1")],
    )
    def test_format(self, x, text):
        assert format_dyadic(x) == text
        assert parse_dyadic(text) == x

    def test_json_roundtrip(self):
        iv = DyadicInterval(Fraction(-7, 16), Fraction(9, 4))
        assert DyadicInterval.from_json(iv.to_json()) == iv

    @given(st.fractions(min_value=-100, max_value=100), st.integers(1, 80))
    def test_directed_rounding(self, x, bits):
        assert dyadic_floor(x, bits) <= x <= dyadic_ceil(x, bits)
        assert dyadic_ceil(x, bits) - dyadic_floor(x, bits) <= Fraction(1, 1 << bits)


class TestSqrtEnclosure:
    @pytest.mark.parametrize("bits", [1, 10, 64, 300])
    def test_perfect_square(self, bits):
        assert sqrt_enclosure(4, bits) == DyadicInterval.point(2)

    def test_sqrt2(self):
        iv = sqrt_enclosure(2, 20)
        assert iv.contains(Fraction(141421356, 10**8))
        assert iv.width <= Fraction(1, 2**20)

    def test_sqrt6_at_10_bits(self):
        iv = sqrt_enclosure(6, 10)
        r = isqrt(6 * 4**10)
        assert iv == DyadicInterval(Fraction(r, 1024), Fraction(r + 1, 1024))
        assert iv.lo <= Fraction(2449489, 10**6) <= iv.hi

    @given(st.integers(1, 10**12), st.integers(1, 200))
    def test_contract(self, f, bits):
        iv = sqrt_enclosure(f, bits)
        assert iv.lo**2 <= f <= iv.hi**2
        assert iv.width <= Fraction(1, 1 << bits)


class TestEvalEnclosure:
    def test_zero(self):
        assert eval_enclosure(QuadInt.zero(make_basis(2)), 30) == DyadicInterval.point(0)

    def test_five_sqrt2(self):
        b = make_basis(1)
        iv = eval_enclosure(QuadInt.from_dict(b, {2: 5}), 30)
        assert mp(iv.lo) <= 5 * mpmath.sqrt(2) <= mp(iv.hi)
        assert iv.width <= 5 * Fraction(1, 2**30) + Fraction(1, 2**30)

    def test_three_terms(self):
        b = make_basis(2)
        iv = eval_enclosure(QuadInt.from_dict(b, {2: 1, 3: 1, 6: -1}), 20)
        # sqrt2 + sqrt3 - sqrt6 = 0.69677...
        assert iv.lo <= Fraction(69678, 10**5) and iv.hi >= Fraction(69677, 10**5)
        assert iv.width <= Fraction(4, 2**20)

    @settings(max_examples=300)
    @given(quad_rats(), st.integers(1, 120))
    def test_contains_and_width(self, w, bits):
        iv = eval_enclosure(w, bits)
        v = mp_value(w)
        assert mp(iv.lo) <= v <= mp(iv.hi)
        total = sum(abs(c) for c in w.coeffs[1:])
        assert iv.width <= Fraction(total + 1, 1 << bits)

    @settings(max_examples=200)
    @given(quad_rats(), st.integers(1, 60), st.integers(1, 60))
    def test_refinement(self, w, b1, b2):
        lo, hi = sorted((b1, b2))
        coarse, fine = eval_enclosure(w, lo), eval_enclosure(w, hi)
        terms = sum(1 for c in w.coeffs if c)
        assert coarse.widen(Fraction(terms, 1 << lo)).contains(fine)

    @given(quad_ints(), st.integers(-50, 50))
    def test_integer_shift_exact(self, w, k):
        a = eval_enclosure(w, 50)
        assert eval_enclosure(w + k, 50) == a + k


class TestFrac:
    def test_integer_element(self):
        r = frac_enclosure(QuadInt.from_int(make_basis(2), 3), Fraction(1, 2**20))
        assert r.int_part == 3 and r.exact and r.frac == DyadicInterval.point(0)

    def test_five_sqrt2(self):
        r = frac_enclosure(QuadInt.from_dict(make_basis(1), {2: 5}), Fraction(1, 2**20))
        assert r.int_part == 7 and not r.exact
        assert r.frac.width <= Fraction(1, 2**20)
        assert abs(float(r.frac.mid) - 0.0710678) < 1e-6

    def test_negative(self):
        r = frac_enclosure(QuadInt.from_dict(make_basis(1), {2: -2}), Fraction(1, 2**20))
        assert r.int_part == -3
        assert abs(float(r.frac.mid) - 0.1715729) < 1e-6

    def test_non_integer_rational(self):
        r = frac_enclosure(QuadRat.from_int(make_basis(1), Fraction(-7, 3)), Fraction(1, 2**30))
        assert r.int_part == -3 and not r.exact
        assert r.frac.contains(Fraction(2, 3))

    def test_budget(self):
        b = make_basis(1)
        with pytest.raises(BudgetExceededError) as info:
            frac_enclosure(QuadInt.from_dict(b, {2: 5}), Fraction(1, 1 << 200), budget=128)
        assert info.value.best is not None

    @settings(max_examples=300)
    @given(quad_rats())
    def test_consistency(self, w):
        r = frac_enclosure(w, Fraction(1, 2**50))
        assert 0 <= r.frac.lo and r.frac.hi <= 1
        assert r.exact == (w.is_rational() and Fraction(w.coeffs[0]).denominator == 1)
        v = mp_value(w)
        assert mp(r.frac.lo) + r.int_part <= v <= mp(r.frac.hi) + r.int_part
        assert r.int_part == int(mpmath.floor(v))


class TestDist:
    def test_integer(self):
        assert dist_to_int(QuadInt.from_int(make_basis(1), 3)) == DyadicInterval.point(0)

    @pytest.mark.parametrize("c, want", [(5, 0.0710678118654752), (2, 0.1715728752538099)])
    def test_examples(self, c, want):
        d = dist_to_int(QuadInt.from_dict(make_basis(1), {2: c}), Fraction(1, 2**50))
        assert abs(float(d.mid) - want) < 1e-14

    @settings(max_examples=300)
    @given(quad_rats())
    def test_symmetric_and_correct(self, w):
        width = Fraction(1, 2**60)
        d1, d2 = dist_to_int(w, width), dist_to_int(-w, width)
        assert d1.width <= width and d2.width <= width
        assert abs(d1.mid - d2.mid) <= d1.width + d2.width
        v = mp_dist(mp_value(w))
        assert mp(d1.lo) <= v <= mp(d1.hi)


class TestSign:
    @settings(max_examples=200)
    @given(quad_rats())
    def test_sign(self, w):
        s = sign(w)
        v = mp_value(w)
        assert s == (0 if w.is_zero() else (1 if v > 0 else -1))

    def test_tiny_value(self):
        b = make_basis(1)
        # 985^2 - 2*696^2 = 1, so 985 - 696 sqrt 2 ~ 5e-4 > 0
        assert sign(QuadInt.from_dict(b, {1: 985, 2: -696})) == 1
        assert sign(QuadInt.from_dict(b, {1: -985, 2: 696})) == -1

    def test_nearest_integer(self):
        b = make_basis(1)
        assert nearest_integer(QuadInt.from_dict(b, {2: 5})) == 7
        assert nearest_integer(QuadInt.from_dict(b, {2: -2})) == -3
        assert nearest_integer(QuadRat.from_int(b, Fraction(5, 2))) == 2
