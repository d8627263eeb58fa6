"""Certified real enclosures of multiquadratic elements.

Every enclosure here is built from integer square roots of scaled integers,
so results are bit-for-bit reproducible and never touch floating point.
Precision escalation doubles the working bit count, starting at 64, until a
floor (or a sign) is decided or the bit budget runs out.
"""

from __future__ import annotations

import decimal
import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt, lcm
from typing import Union

from .errors import BudgetExceededError
from .ring import QuadNumber

DEFAULT_BIT_BUDGET = 4096
START_BITS = 64
GUARD_BITS = 2

Number = Union[int, Fraction]


def _is_dyadic(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


def dyadic_floor(x: Number, bits: int) -> Fraction:
    """Largest multiple of 2**-bits that is <= x."""
    x = Fraction(x)
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


def dyadic_ceil(x: Number, bits: int) -> Fraction:
    x = Fraction(x)
    return Fraction(-((-x.numerator << bits) // x.denominator), 1 << bits)


def format_dyadic(x: Fraction) -> str:
    """Render a dyadic rational as ``"m*2^e"`` with m odd (or m = 0)."""
    if x == 0:
        return "0*2^0"
    m, d = x.numerator, x.denominator
    e = -(d.bit_length() - 1)
    while m % 2 == 0:
        m //= 2
        e += 1
    return f"{m}*2^{e}"


_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*\*\s*2\^\s*(-?\d+)\s*$")


def parse_dyadic(text: str) -> Fraction:
    match = _DYADIC_RE.match(text)
    if not match:
        raise ValueError(f"not a dyadic literal: {text!r}")
    m, e = int(match.group(1)), int(match.group(2))
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def to_decimal(x: Fraction, digits: int = 20, rounding: str = decimal.ROUND_HALF_EVEN,
               style: str = "g") -> str:
    """Decimal rendering; pass ROUND_FLOOR or ROUND_CEILING for certified bounds."""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        value = decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)
    return format(value, style)


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval [lo, hi] with dyadic rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if not (_is_dyadic(lo) and _is_dyadic(hi)):
            raise ValueError(f"endpoints must be dyadic: [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> DyadicInterval:
        return cls(Fraction(x), Fraction(x))

    @classmethod
    def from_scaled(cls, lo: int, hi: int, bits: int) -> DyadicInterval:
        return cls(Fraction(lo, 1 << bits), Fraction(hi, 1 << bits))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, DyadicInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __add__(self, other):
        if isinstance(other, DyadicInterval):
            return DyadicInterval(self.lo + other.lo, self.hi + other.hi)
        if isinstance(other, int):
            return DyadicInterval(self.lo + other, self.hi + other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> DyadicInterval:
        return DyadicInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        if isinstance(other, (DyadicInterval, int)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k: int) -> DyadicInterval:
        if k >= 0:
            return DyadicInterval(self.lo * k, self.hi * k)
        return DyadicInterval(self.hi * k, self.lo * k)

    def abs_upper(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def widen(self, amount: Fraction) -> DyadicInterval:
        return DyadicInterval(self.lo - amount, self.hi + amount)

    def to_json(self) -> dict:
        return {
            "lo": format_dyadic(self.lo),
            "hi": format_dyadic(self.hi),
            "decimal": to_decimal(self.mid),
        }

    @classmethod
    def from_json(cls, data) -> DyadicInterval:
        return cls(parse_dyadic(data["lo"]), parse_dyadic(data["hi"]))

    def __str__(self) -> str:
        return f"[{to_decimal(self.lo)}, {to_decimal(self.hi)}]"


@dataclass(frozen=True)
class FracResult:
    int_part: int
    frac: DyadicInterval
    exact: bool

    def value(self) -> DyadicInterval:
        return self.frac + self.int_part


def sqrt_enclosure(f: int, bits: int) -> DyadicInterval:
    """Enclose sqrt(f) in an interval of width at most 2**-bits."""
    if f < 0:
        raise ValueError("sqrt_enclosure needs f >= 0")
    scaled = f << (2 * bits)
    r = isqrt(scaled)
    if r * r == scaled:
        return DyadicInterval.from_scaled(r, r, bits)
    return DyadicInterval.from_scaled(r, r + 1, bits)


def _scaled_bounds(w: QuadNumber, bits: int) -> tuple[int, int]:
    """Integers lo, hi with lo <= w * 2**bits <= hi."""
    products = w.basis.products
    fracs = [Fraction(c) for c in w.coeffs]
    den = lcm(*(c.denominator for c in fracs)) if fracs else 1
    lo = hi = 0
    for f, c in zip(products, fracs):
        if not c:
            continue
        p, q = c.numerator, c.denominator
        m = den // q
        if f == 1:
            exact = (p * m) << bits
            lo += exact
            hi += exact
            continue
        # |c| sqrt(f) 2^bits * q = sqrt(p^2 f 4^bits)
        scaled = (p * p * f) << (2 * bits)
        r = isqrt(scaled)
        r_up = r if r * r == scaled else r + 1
        if p > 0:
            lo += m * r
            hi += m * r_up
        else:
            lo -= m * r_up
            hi -= m * r
    if den == 1:
        return lo, hi
    return lo // den, -(-hi // den)


def eval_enclosure(w: QuadNumber, bits: int) -> DyadicInterval:
    """Enclose the real value of ``w``.

    The width is at most 2**-bits * (sum of |c_f| over f > 1) plus one
    2**-bits ulp; integer-coefficient elements incur no rounding beyond the
    per-term square-root step.
    """
    b = bits + GUARD_BITS
    lo, hi = _scaled_bounds(w, b)
    return DyadicInterval.from_scaled(lo, hi, b)


def _bits_for_width(target_width: Number) -> int:
    t = Fraction(target_width)
    if t <= 0:
        raise ValueError("target_width must be positive")
    return max(1, -floor(_log2_floor(t))) + 4


def _log2_floor(x: Fraction) -> int:
    # floor(log2(x)) for positive rational x
    k = x.numerator.bit_length() - x.denominator.bit_length()
    if Fraction(2) ** k > x:
        k -= 1
    return k


def frac_enclosure(
    w: QuadNumber,
    target_width: Number = Fraction(1, 1 << 40),
    budget: int = DEFAULT_BIT_BUDGET,
) -> FracResult:
    """Integer part and certified fractional part of ``w``."""
    c1 = Fraction(w.coeffs[0])
    if w.is_rational() and c1.denominator == 1:
        return FracResult(c1.numerator, DyadicInterval.point(0), True)
    bits = min(max(START_BITS, _bits_for_width(target_width)), budget)
    best = None
    while True:
        enc = eval_enclosure(w, bits)
        best = enc
        fl = floor(enc.lo)
        if fl == floor(enc.hi) and enc.width <= target_width:
            return FracResult(fl, enc - fl, False)
        if bits >= budget:
            raise BudgetExceededError(
                f"floor of {w} undecided at {bits} bits; best enclosure {enc}", best
            )
        bits = min(2 * bits, budget)


def _dist_from_frac(frac: DyadicInterval) -> DyadicInterval:
    half = Fraction(1, 2)
    a, b = frac.lo, frac.hi
    if b <= half:
        return DyadicInterval(a, b)
    if a >= half:
        return DyadicInterval(1 - b, 1 - a)
    return DyadicInterval(min(a, 1 - b), half)


def dist_to_int(
    w: QuadNumber,
    target_width: Number = Fraction(1, 1 << 40),
    budget: int = DEFAULT_BIT_BUDGET,
) -> DyadicInterval:
    """Enclosure of the distance from ``w`` to the nearest integer."""
    return _dist_from_frac(frac_enclosure(w, target_width, budget).frac)


def nearest_integer(w: QuadNumber, budget: int = DEFAULT_BIT_BUDGET) -> int:
    """The integer d minimizing |w - d|, certified."""
    res = frac_enclosure(w, Fraction(1, 1 << 20), budget)
    width = Fraction(1, 1 << 20)
    while True:
        if res.frac.hi < Fraction(1, 2):
            return res.int_part
        if res.frac.lo > Fraction(1, 2):
            return res.int_part + 1
        if res.exact or (res.frac.is_point() and res.frac.lo == Fraction(1, 2)):
            # exact half: ties go down
            return res.int_part
        width /= 1 << 32
        res = frac_enclosure(w, width, budget)


def sign(w: QuadNumber, budget: int = DEFAULT_BIT_BUDGET) -> int:
    """Exact sign of ``w`` (zero only when w is literally zero)."""
    if w.is_zero():
        return 0
    if w.is_rational():
        return 1 if w.coeffs[0] > 0 else -1
    bits = START_BITS
    while True:
        enc = eval_enclosure(w, bits)
        if enc.lo > 0:
            return 1
        if enc.hi < 0:
            return -1
        if bits >= budget:
            raise BudgetExceededError(f"sign of {w} undecided at {bits} bits", enc)
        bits = min(2 * bits, budget)


def enclose_to_relative(w: QuadNumber, rel_bits: int = 64, budget: int = DEFAULT_BIT_BUDGET) -> DyadicInterval:
    """Enclosure of ``w`` whose width is below 2**-rel_bits times |w|."""
    if w.is_zero():
        return DyadicInterval.point(0)
    bits = START_BITS
    while True:
        enc = eval_enclosure(w, bits)
        if (enc.lo > 0 or enc.hi < 0) and enc.width * (1 << rel_bits) <= min(abs(enc.lo), abs(enc.hi)):
            return enc
        if bits >= budget:
            raise BudgetExceededError(f"relative enclosure of {w} failed at {bits} bits", enc)
        bits = min(2 * bits, budget)
