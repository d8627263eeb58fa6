from __future__ import annotations

from fractions import Fraction as F
from math import isqrt

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootsum.driver import ScanRow, exponent_scan, gamma, parse_alpha, solve_theorem2
from rootsum.errors import UsageError


def mpf(x: F):
    return mpmath.mpf(x.numerator) / x.denominator


def mp_err(b, alpha):
    s = sum(mpmath.sqrt(x) for x in b) - mpf(alpha)
    return abs(s - mpmath.nint(s))


class TestGamma:
    @pytest.mark.parametrize("k, g, tau", [(1, F(1, 2), 1), (3, F(3, 2), 2), (5, F(3, 2), 2), (7, F(7, 2), 3)])
    def test_examples(self, k, g, tau):
        assert gamma(k) == (g, tau)

    def test_laws(self):
        for k in range(1, 65):
            g, tau = gamma(k)
            assert 2**tau <= k + 1 < 2 ** (tau + 1)
            assert g >= F(k - 1, 4)
            if (k + 1) & k == 0:
                assert g == F(k, 2)


class TestAlpha:
    @pytest.mark.parametrize("text, want", [("0.5", F(1, 2)), ("7/3", F(1, 3)), ("-0.25", F(3, 4)), ("0", F(0)), ("2", F(0))])
    def test_rational(self, text, want):
        assert parse_alpha(text) == want

    @pytest.mark.parametrize("text, value", [("pi", mpmath.pi - 3), ("{pi}", mpmath.pi - 3), ("sqrt2", mpmath.sqrt(2) - 1), ("e", mpmath.e - 2)])
    def test_tokens(self, text, value):
        a = parse_alpha(text, 200)
        # truncation: a <= value < a + 2^-200
        assert 0 <= value - mpf(a) < mpmath.mpf(2) ** -200
        assert (2**200) % a.denominator == 0

    @pytest.mark.parametrize("text", ["abc", "1/0", ""])
    def test_bad(self, text):
        with pytest.raises(UsageError):
            parse_alpha(text)


class TestSolve:
    def test_k3_n24(self):
        a = solve_theorem2(3, "0.3", 24)
        assert a.tau == 2 and a.m == 2 and len(a.b) == 3
        for (f, c), b in zip(a.coeffs.items(), a.b):
            assert 1 <= c <= 2 and b == c * c * f <= 24

    def test_k1_n100_oracle(self):
        a = solve_theorem2(1, "1/2", 100)
        assert a.m == 7
        # exhaustive oracle over the family b = 2c^2 <= 100
        best = min(mp_err([2 * c * c], F(1, 2)) for c in range(1, 8))
        assert mpf(a.err.lo) <= best <= mpf(a.err.hi)
        assert mp_err(a.b, F(1, 2)) <= mpf(a.D_emp) / mpmath.sqrt(100)

    def test_padding(self):
        a = solve_theorem2(2, "0", 100)
        assert a.b[0] == 1 and len(a.b) == 2
        assert a.err == a.err_unpadded
        assert mpf(a.err.lo) <= mp_err(a.b[1:], F(0)) <= mpf(a.err.hi)

    def test_threshold(self):
        with pytest.raises(UsageError, match="24"):
            solve_theorem2(3, "0.5", 23)

    def test_greedy_method(self):
        a = solve_theorem2(1, "1/3", 5000, method="greedy")
        assert a.method == "greedy" and a.greedy is not None
        assert a.greedy.greedy.residual.lo >= 0
        assert a.coeffs == a.greedy.d
        assert a.err.lo <= a.greedy.err.hi and a.greedy.err.lo <= a.err.hi
        box = solve_theorem2(1, "1/3", 5000, method="box")
        assert box.err.lo <= a.err.hi

    def test_auto_reports_greedy(self):
        a = solve_theorem2(3, "pi", 10000)
        assert a.method == "box" and a.greedy is not None
        assert a.err.lo <= a.greedy.err.hi

    def test_greedy_needs_box(self):
        with pytest.raises(UsageError):
            solve_theorem2(1, "0.5", 64, method="greedy")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 3000), st.fractions(0, 1, max_denominator=997))
    def test_properties(self, k, extra, alpha):
        _, tau = gamma(k)
        P = [2, 6, 30][tau - 1]
        n = 4 * P + extra
        a = solve_theorem2(k, f"{alpha.numerator}/{alpha.denominator}", n)
        assert len(a.b) == k and all(1 <= b <= n for b in a.b)
        assert a.m == isqrt(n // P)
        assert mpf(a.err.lo) <= mp_err(a.b, alpha) <= mpf(a.err.hi)
        if a.greedy is not None:
            assert a.greedy.greedy.residual.lo >= 0


class TestScan:
    def test_csv(self):
        r = exponent_scan("t2", 1, [64, 256, 1024], "0.5")
        lines = r.to_csv().splitlines()
        assert lines[0] == "n,err_lo,err_hi,bound,slope_window"
        assert len(lines) == 4 and lines[1].endswith(",") and not lines[3].endswith(",")
        assert r.slope < 0

    def test_deterministic_jobs(self):
        a = exponent_scan("t2", 3, [100, 1000, 10000], "pi", jobs=1).to_csv()
        b = exponent_scan("t2", 3, [100, 1000, 10000], "pi", jobs=8).to_csv()
        assert a == b

    def test_theorem1_k2(self):
        r = exponent_scan("t1", 2, [50, 100, 200, 400, 800])
        assert abs(r.slope + 2) < 0.1

    def test_too_few(self):
        with pytest.raises(UsageError):
            exponent_scan("t2", 1, [64, 256])

    def test_row_order(self):
        with pytest.raises(ValueError):
            ScanRow(1, F(2), F(1), F(1))
