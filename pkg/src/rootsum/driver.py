"""End-to-end solvers and exponent scans.

Approximating a target: with tau = floor(log2(k+1)) and P = p_1...p_tau, put
m = floor(sqrt(n / P)).  Coefficients 1 <= c_f <= m give radicands
b = c_f^2 f <= n, and sum c_f sqrt(f) lands within O(m^-(2^tau - 1)) of the
target mod 1, i.e. O(n^-gamma_k).  The remaining k + 1 - 2^tau radicands are
1, which shifts the sum by an integer.

Two ways of picking the c_f are offered.  ``greedy`` runs the ladder descent
(one-sided, height-capped).  ``box`` takes the exact optimum over the same
box [1, m]^(2^tau - 1); it contains the greedy choice, so it is never worse.
``auto`` runs the greedy stage whenever m >= 6 and reports its certificate,
then returns the box optimum when the box fits under the enumeration cap.
"""

from __future__ import annotations

import csv
import decimal
import io
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, prod
from typing import Optional, Sequence

import mpmath

from .errors import UsageError
from .evaluation import (
    DEFAULT_BIT_BUDGET,
    DyadicInterval,
    dist_to_int,
    dyadic_ceil,
    dyadic_floor,
    format_dyadic,
    to_decimal,
)
from .greedy import LadderSource, ShiftResult, shift_to_positive
from .pairs import (
    Theorem1Instance,
    build_pair,
    fit_slope,
    theorem1_instance,
    theorem1_verify,
)
from .pigeonhole import DEFAULT_ENUM_CAP, box_best_approx
from .ring import MAX_TAU, QuadRat, make_basis

METHODS = ("auto", "greedy", "box")


def gamma(k: int) -> tuple[Fraction, int]:
    """(gamma_k, tau) with tau = floor(log2(k+1)) and gamma_k = 2^(tau-1) - 1/2."""
    if k < 1:
        raise UsageError("k must be a positive integer")
    tau = (k + 1).bit_length() - 1
    return Fraction(2 ** (tau - 1)) - Fraction(1, 2), tau


# ---------------------------------------------------------------- targets

_CONSTANTS = {"pi": lambda: +mpmath.pi, "sqrt2": lambda: mpmath.sqrt(2), "e": lambda: +mpmath.e}
_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*/\s*(\d+)\s*$")


def parse_alpha(text: str, bits: int = 256) -> Fraction:
    """Exact rational target reduced mod 1.

    Accepts a decimal literal, ``p/q``, or one of the tokens pi, sqrt2, e
    (optionally wrapped in braces).  Tokens are truncated to ``bits`` binary
    digits, so the conversion error is below 2**-bits.
    """
    s = text.strip()
    if s.startswith("{") and s.endswith("}"):
        s = s[1:-1].strip()
    token = s.lower()
    if token in _CONSTANTS:
        with mpmath.workprec(bits + 32):
            x = _CONSTANTS[token]()
            value = Fraction(int(mpmath.floor(x * mpmath.mpf(2) ** bits)), 1 << bits)
    elif m := _RATIONAL_RE.match(s):
        p, q = int(m.group(1)), int(m.group(2))
        if q == 0:
            raise UsageError(f"zero denominator in alpha {text!r}")
        value = Fraction(p, q)
    else:
        try:
            value = Fraction(decimal.Decimal(s))
        except (decimal.InvalidOperation, ValueError):
            raise UsageError(f"cannot parse alpha {text!r}") from None
    return value - (value.numerator // value.denominator)


def _alpha_bits(n: int, g: Fraction) -> int:
    # error < n^-gamma / 2^10, with room to spare
    return max(256, int(g * n.bit_length()) + 64)


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class GammaBound:
    """Dyadic enclosure of n^-gamma, from an integer square root."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def of(cls, n: int, g: Fraction, bits: int = 128) -> GammaBound:
        # n^-gamma = 1 / sqrt(n^(2 gamma)) with 2 gamma an integer
        two_g = int(2 * g)
        assert two_g == 2 * g
        big = n**two_g
        r = isqrt(big)
        r_hi = r if r * r == big else r + 1
        return cls(dyadic_floor(Fraction(1, r_hi), bits), dyadic_ceil(Fraction(1, r), bits))


@dataclass(frozen=True)
class Approximation:
    k: int
    n: int
    alpha: Fraction
    alpha_text: str
    b: list[int]
    err: DyadicInterval
    bound: GammaBound
    method: str
    tau: int
    m: int
    coeffs: dict[int, int]
    err_unpadded: DyadicInterval = field(repr=False)
    greedy: Optional[ShiftResult] = field(default=None, repr=False)

    @property
    def gamma(self) -> Fraction:
        return gamma(self.k)[0]

    @property
    def D_emp(self) -> Fraction:
        """Certified upper bound on err / n^-gamma."""
        return self.err.hi / self.bound.lo

    def to_json(self) -> dict:
        out = {
            "k": self.k,
            "n": self.n,
            "tau": self.tau,
            "m": self.m,
            "alpha": str(self.alpha),
            "alpha_text": self.alpha_text,
            "gamma": str(self.gamma),
            "method": self.method,
            "coeffs": {str(f): c for f, c in self.coeffs.items()},
            "b": self.b,
            "err": self.err.to_json(),
            "bound": {
                "lo": format_dyadic(self.bound.lo),
                "hi": format_dyadic(self.bound.hi),
                "decimal": to_decimal(self.bound.hi, 12),
            },
            "D_emp": to_decimal(self.D_emp, 12),
        }
        if self.greedy is not None:
            g = self.greedy
            out["greedy"] = {
                "coeffs": {str(f): d for f, d in g.d.items()},
                "err": g.err.to_json(),
                "residual": g.greedy.residual.to_json(),
                "t": g.greedy.t,
                "y": g.greedy.y,
                "height_used": g.greedy.height_used,
            }
        return out


def _certified_dist(w: QuadRat, budget: int) -> DyadicInterval:
    """Distance to Z with width below 2^-20 of its size (or 2^-160)."""
    width = Fraction(1, 1 << 64)
    while True:
        d = dist_to_int(w, width, budget)
        if d.width * (1 << 20) <= d.lo or width <= Fraction(1, 1 << 160):
            return d
        width /= 1 << 32


def solve_theorem2(
    k: int,
    alpha_text: str,
    n: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    method: str = "auto",
    ladder_source: Optional[LadderSource] = None,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> Approximation:
    """k radicands in [1, n] whose square roots sum to within O(n^-gamma_k) of alpha mod 1."""
    if method not in METHODS:
        raise UsageError(f"method must be one of {METHODS}, got {method!r}")
    g, tau = gamma(k)
    if tau > MAX_TAU:
        raise UsageError(f"k={k} needs tau={tau} > {MAX_TAU}")
    basis = make_basis(tau)
    P = prod(basis.primes)
    if n < 4 * P:
        raise UsageError(f"n={n} is below the threshold 4*{P} = {4 * P} for k={k}")
    alpha = parse_alpha(alpha_text, _alpha_bits(n, g))
    m = isqrt(n // P)
    dim = basis.size - 1

    greedy_res = None
    if method in ("auto", "greedy") and m >= 6:
        greedy_res = shift_to_positive(alpha, basis, m, enum_cap, ladder_source, budget)
    elif method == "greedy":
        raise UsageError(f"box size m={m} < 6: the greedy stage needs m >= 6 (use --method box)")

    if method == "greedy" or (method == "auto" and m**dim > enum_cap):
        used = "greedy"
        coeffs = dict(greedy_res.d)
    else:
        used = "box"
        w, _ = box_best_approx(basis, 1, m, alpha, enum_cap, jobs, budget)
        coeffs = {f: int(c) for f, c in zip(basis.nonunit_products, w.coeffs[1:])}

    pad = k + 1 - 2**tau
    b = [1] * pad + [c * c * f for f, c in coeffs.items()]
    if len(b) != k or not all(1 <= x <= n for x in b):
        raise AssertionError(f"radicands out of range: {b}")
    core = QuadRat(basis, [0, *coeffs.values()]) - alpha
    err_unpadded = _certified_dist(core, budget)
    err = _certified_dist(core + pad, budget)
    if err != err_unpadded:
        raise AssertionError("padding changed the certified error")
    if greedy_res is not None and used == "box" and err.lo > greedy_res.err.hi:
        raise AssertionError("box optimum worse than the greedy point it contains")
    return Approximation(
        k, n, alpha, alpha_text, b, err, GammaBound.of(n, g), used, tau, m, coeffs,
        err_unpadded, greedy_res,
    )


# ---------------------------------------------------------------- scans


@dataclass(frozen=True)
class ScanRow:
    n: int
    err_lo: Fraction
    err_hi: Fraction
    bound: Fraction
    slope_window: Optional[float] = None

    def __post_init__(self):
        if self.err_lo > self.err_hi:
            raise ValueError("err_lo must not exceed err_hi")

    @property
    def mid(self) -> Fraction:
        return (self.err_lo + self.err_hi) / 2


@dataclass(frozen=True)
class ScanResult:
    mode: str
    k: int
    rows: list[ScanRow]
    slope: Optional[float]
    max_ratio: Fraction
    approximations: list[Approximation] = field(default_factory=list, repr=False)
    instance: Optional[Theorem1Instance] = field(default=None, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "err_lo", "err_hi", "bound", "slope_window"])
        for r in self.rows:
            writer.writerow([
                r.n,
                _dec(r.err_lo, decimal.ROUND_FLOOR),
                _dec(r.err_hi, decimal.ROUND_CEILING),
                _dec(r.bound, decimal.ROUND_HALF_EVEN),
                "" if r.slope_window is None else f"{r.slope_window:.6f}",
            ])
        return buf.getvalue()


def _dec(x: Fraction, rounding, digits: int = 12) -> str:
    return to_decimal(x, digits, rounding, "E")


SLOPE_WINDOW = 3


def _windowed(rows: list[ScanRow]) -> list[ScanRow]:
    out = []
    for i, r in enumerate(rows):
        s = None
        if i + 1 >= SLOPE_WINDOW:
            win = rows[i + 1 - SLOPE_WINDOW : i + 1]
            s = fit_slope([w.n for w in win], [w.mid for w in win])
        out.append(ScanRow(r.n, r.err_lo, r.err_hi, r.bound, s))
    return out


def exponent_scan(
    mode: str,
    k: int,
    n_list: Sequence[int],
    alpha_text: str = "0",
    enum_cap: int = DEFAULT_ENUM_CAP,
    method: str = "auto",
    ladder_source: Optional[LadderSource] = None,
    jobs: int = 1,
    T: int = 1,
    eps: Fraction = Fraction(1, 4),
) -> ScanResult:
    """Run a solver over n_list and fit log(err) against log(n).

    ``theorem2`` reports max D_emp; ``theorem1`` varies the series variable n
    of a fixed instance and reports max n^k err.
    """
    mode = {"t1": "theorem1", "t2": "theorem2"}.get(mode, mode)
    ns = list(n_list)
    if len(ns) < 3:
        raise UsageError("a scan needs at least 3 values of n")
    if ns != sorted(set(ns)):
        raise UsageError("n_list must be strictly ascending")
    if mode == "theorem2":
        apps = [solve_theorem2(k, alpha_text, n, enum_cap, method, ladder_source, jobs) for n in ns]
        rows = [ScanRow(a.n, a.err.lo, a.err.hi, a.bound.hi) for a in apps]
        rows = _windowed(rows)
        slope = fit_slope(ns, [r.mid for r in rows])
        return ScanResult(mode, k, rows, slope, max(a.D_emp for a in apps), apps)
    if mode == "theorem1":
        inst = theorem1_instance(k, build_pair(k, T, eps))
        res = theorem1_verify(inst, ns)
        rows = [ScanRow(r.n, r.err.lo, r.err.hi, Fraction(1, r.n**k)) for r in res.rows]
        rows = _windowed(rows)
        return ScanResult(mode, k, rows, res.slope, max(r.err.hi * r.n**k for r in res.rows),
                          instance=inst)
    raise UsageError(f"unknown scan mode {mode!r}")
