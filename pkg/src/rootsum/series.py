"""Exact truncated expansions in powers of 1/n.

A :class:`TruncatedSeries` of order T stores rational coefficients l_d for
degrees -1 <= d <= T and stands for

    l_{-1} n + l_0 + sum_{t=1}^{T} l_t n^{-t} + O(n^{-T-1}).

Everything is exact rational arithmetic.

>>> s = sqrt_term_series(SqrtTerm(Fraction(1), 0, Fraction(1)), 3)
>>> [str(s.l(d)) for d in range(-1, 4)]
['1', '0', '1/2', '0', '-1/8']
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

Rational = Fraction


@lru_cache(maxsize=None)
def delta_R(j: int, n: int) -> Fraction:
    """Delta_j(R; n) for R(n) = 1/n, by the defining recursion."""
    if j < 1 or n < 1:
        raise ValueError("delta_R needs j >= 1 and n >= 1")
    if j == 1:
        return Fraction(1, n)
    return delta_R(j - 1, n) - delta_R(j - 1, n + 1)


def delta_R_closed(j: int, n: int) -> Fraction:
    den = 1
    for m in range(j):
        den *= n + m
    return Fraction(factorial(j - 1), den)


def _mul_trunc(a: list[Fraction], b: list[Fraction], T: int) -> list[Fraction]:
    out = [Fraction(0)] * (T + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for k, y in enumerate(b[: T + 1 - i]):
            out[i + k] += x * y
    return out


def K_coeffs(j: int, T: int) -> list[Fraction]:
    """K(j, 0..T): (j-1)!/prod_{m<j}(n+m) = sum_t K(j,t) n^{-j-t} + O(n^{-j-T-1})."""
    if j < 1 or T < 0:
        raise ValueError("K_coeffs needs j >= 1 and T >= 0")
    acc = [Fraction(1)] + [Fraction(0)] * T
    for m in range(1, j):
        # (1 + m/n)^{-1} = sum_q (-m)^q n^{-q}
        acc = _mul_trunc(acc, [Fraction((-m) ** q) for q in range(T + 1)], T)
    f = factorial(j - 1)
    return [f * c for c in acc]


def C_coeffs(w: int) -> Fraction:
    """Generalized binomial coefficient binom(1/2, w)."""
    if w < 0:
        raise ValueError("C_coeffs needs w >= 0")
    out = Fraction(1)
    for i in range(w):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def P_coeffs(t: int, d: int, H: int) -> list[Fraction]:
    """P(t, d, 0..H): (n+d)^{-t} = sum_q P(t,d,q) n^{-t-q} + O(n^{-t-H-1})."""
    if t < 1 or H < 0:
        raise ValueError("P_coeffs needs t >= 1 and H >= 0")
    return [Fraction((-1) ** q * comb(t + q - 1, q) * d**q) for q in range(H + 1)]


@dataclass(frozen=True)
class TruncatedSeries:
    T: int
    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for d, c in self.coeffs.items():
            if not -1 <= d <= self.T:
                raise ValueError(f"degree {d} outside [-1, {self.T}]")
            c = Fraction(c)
            if c:
                clean[d] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def tail_order(self) -> int:
        return self.T + 1

    def l(self, d: int) -> Fraction:
        return self.coeffs.get(d, Fraction(0))

    def truncate(self, T: int) -> TruncatedSeries:
        T = min(T, self.T)
        return TruncatedSeries(T, {d: c for d, c in self.coeffs.items() if d <= T})

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        T = min(self.T, other.T)
        out: dict[int, Fraction] = {}
        for s in (self, other):
            for d, c in s.coeffs.items():
                if d <= T:
                    out[d] = out.get(d, Fraction(0)) + c
        return TruncatedSeries(T, out)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.T, {d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def scale(self, a) -> TruncatedSeries:
        a = Fraction(a)
        return TruncatedSeries(self.T, {d: a * c for d, c in self.coeffs.items()})

    def shifted(self, s: int) -> TruncatedSeries:
        """Series of the same function evaluated at n + s."""
        out: dict[int, Fraction] = {}

        def add(d, c):
            out[d] = out.get(d, Fraction(0)) + c

        for d, c in self.coeffs.items():
            if d == -1:
                add(-1, c)
                add(0, c * s)
            elif d == 0:
                add(0, c)
            else:
                for q, p in enumerate(P_coeffs(d, s, self.T - d)):
                    add(d + q, c * p)
        return TruncatedSeries(self.T, out)

    def __call__(self, n) -> Fraction:
        """Value of the truncated expansion at n (exact)."""
        n = Fraction(n)
        total = Fraction(0)
        for d, c in self.coeffs.items():
            total += c * n ** (-d)
        return total

    def to_json(self) -> dict:
        return {"T": self.T, "coeffs": {str(d): str(c) for d, c in self.coeffs.items()}}

    def __str__(self) -> str:
        parts = []
        for d, c in self.coeffs.items():
            if d == -1:
                parts.append(f"({c})*n")
            elif d == 0:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})/n^{d}")
        return " + ".join(parts or ["0"]) + f" + O(n^-{self.tail_order})"


@dataclass(frozen=True)
class SqrtTerm:
    """The function a * sqrt((n + d)^2 + c)."""

    a: Fraction
    d: int
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.a <= 0:
            raise ValueError(f"outer coefficient must be positive, got {self.a}")
        if self.c == 0:
            raise ValueError("perturbation c must be nonzero")
        if self.d < 0 or (1 + self.d) ** 2 + self.c < 0:
            raise ValueError(f"term undefined at n = 1: d={self.d}, c={self.c}")

    def shifted(self, s: int) -> SqrtTerm:
        return SqrtTerm(self.a, self.d + s, self.c)

    def scaled(self, r) -> SqrtTerm:
        return SqrtTerm(self.a * Fraction(r), self.d, self.c)

    def to_json(self) -> dict:
        return {"a": str(self.a), "d": self.d, "c": str(self.c)}


def delta_R_series(j: int, T: int) -> TruncatedSeries:
    """Delta_j(R; n) as a series of order T (degrees j..T)."""
    return TruncatedSeries(T, {j + t: k for t, k in enumerate(K_coeffs(j, max(0, T - j)))
                               if j + t <= T})


def sqrt_term_series(term: SqrtTerm, T: int) -> TruncatedSeries:
    """Expansion of a sqrt((n+d)^2 + c): expand at x = n + d, then recenter at n."""
    if T < 1:
        raise ValueError("sqrt_term_series needs T >= 1")
    a, d, c = term.a, term.d, term.c
    # a sqrt(x^2 + c) = a x + sum_{w >= 1} a C_w c^w x^{1 - 2w}
    at_x = {-1: a}
    for w in range(1, (T + 1) // 2 + 1):
        at_x[2 * w - 1] = a * C_coeffs(w) * c**w
    return TruncatedSeries(T, at_x).shifted(d)


def series_sum(terms: Iterable[SqrtTerm], T: int) -> TruncatedSeries:
    total = TruncatedSeries(T)
    for term in terms:
        total = total + sqrt_term_series(term, T)
    return total


def probe_tables(jmax: int = 4, T: int = 4, wmax: int = 5) -> dict:
    """K, C and P tables for documentation and the ``series --probe`` command."""
    return {
        "K": {str(j): [str(x) for x in K_coeffs(j, T)] for j in range(1, jmax + 1)},
        "C": [str(C_coeffs(w)) for w in range(wmax + 1)],
        "P": {
            f"{t},{d}": [str(x) for x in P_coeffs(t, d, T)]
            for t in range(1, 4)
            for d in (-1, 1, 2)
        },
    }
