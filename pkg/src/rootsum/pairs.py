"""(T, eps, h)-pairs of square-root sums and explicit instances built from them.

Elements of S_{v,h,+} are sums  sum_{j=1}^{h} a_j sqrt((n+j-1)^2 + (-1)^{j-1}/v)
with rational a_j > 0; S_{v,h,-} flips every sign of the perturbation.  Two
elements form a (T, eps, h)-pair when their expansions have vanishing
coefficients below degree h, leading coefficients +-K(h, 0), and the next T
coefficients within eps of +-K(h, q).

Pairs are built by induction on h: start from 2v sqrt(n^2 +- 1/v), then
repeatedly form r_+(n) + r_-(n+1) and r_+(n+1) + r_-(n) and rescale.  The
final certificate is checked exactly, so no a priori error constants are
needed.
"""

from __future__ import annotations

import decimal
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError, DegenerateError, NotFoundError, UsageError
from .evaluation import DyadicInterval, sqrt_enclosure, to_decimal
from .series import K_coeffs, SqrtTerm, TruncatedSeries, series_sum

log = logging.getLogger(__name__)

DEFAULT_V_SCHEDULE = tuple(2**e for e in range(4, 21))


def _class_sign(sign_class: str) -> int:
    if sign_class not in ("+", "-"):
        raise ValueError(f"sign class must be '+' or '-', got {sign_class!r}")
    return 1 if sign_class == "+" else -1


@dataclass(frozen=True)
class SqrtSumExpr:
    """sum_j a_j sqrt((n + j - 1)^2 + c_j) with the alternating c_j of one sign class."""

    a: tuple[Fraction, ...]
    v: int
    sign_class: str

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(Fraction(x) for x in self.a))
        _class_sign(self.sign_class)
        if not self.a:
            raise ValueError("an expression needs at least one term")
        if any(x <= 0 for x in self.a):
            raise ValueError(f"outer coefficients must be positive: {self.a}")
        if self.v < 1:
            raise ValueError("v must be a positive integer")

    @property
    def h(self) -> int:
        return len(self.a)

    def c(self, j: int) -> Fraction:
        """Perturbation of the term at shift j (0-based)."""
        return Fraction(_class_sign(self.sign_class) * (-1) ** j, self.v)

    @property
    def terms(self) -> list[SqrtTerm]:
        return [SqrtTerm(a, j, self.c(j)) for j, a in enumerate(self.a)]

    def series(self, T: int) -> TruncatedSeries:
        return series_sum(self.terms, T)

    def scaled(self, r) -> SqrtSumExpr:
        r = Fraction(r)
        if r <= 0:
            raise DegenerateError(f"rescaling factor must be positive, got {r}")
        return SqrtSumExpr(tuple(r * x for x in self.a), self.v, self.sign_class)

    def to_json(self) -> dict:
        return {"a": [str(x) for x in self.a], "v": self.v, "sign_class": self.sign_class}


@dataclass(frozen=True)
class PairCheck:
    """Outcome of the four pair conditions with exact margins."""

    vanishing: bool
    leading: bool
    dev_plus: Fraction
    dev_minus: Fraction
    eps: Fraction

    @property
    def margin(self) -> Fraction:
        return max(self.dev_plus, self.dev_minus)

    @property
    def ok(self) -> bool:
        return self.vanishing and self.leading and self.margin <= self.eps

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "vanishing": self.vanishing,
            "leading": self.leading,
            "dev_plus": str(self.dev_plus),
            "dev_minus": str(self.dev_minus),
            "eps": str(self.eps),
            "ok": self.ok,
        }


def is_pair(omega_plus: SqrtSumExpr, omega_minus: SqrtSumExpr, T: int, eps, h: int) -> PairCheck:
    """Check the (T, eps, h)-pair conditions exactly."""
    eps = Fraction(eps)
    membership = (
        omega_plus.sign_class == "+"
        and omega_minus.sign_class == "-"
        and omega_plus.h == omega_minus.h == h
        and omega_plus.v == omega_minus.v
    )
    sp, sm = omega_plus.series(h + T), omega_minus.series(h + T)
    K = K_coeffs(h, T)
    vanishing = membership and all(sp.l(q) == 0 and sm.l(q) == 0 for q in range(1, h))
    leading = sp.l(h) == K[0] and sm.l(h) == -K[0]
    dev_plus = max((abs(sp.l(h + q) - K[q]) for q in range(1, T + 1)), default=Fraction(0))
    dev_minus = max((abs(sm.l(h + q) + K[q]) for q in range(1, T + 1)), default=Fraction(0))
    return PairCheck(vanishing, leading, dev_plus, dev_minus, eps)


@dataclass(frozen=True)
class PairCert:
    omega_plus: SqrtSumExpr
    omega_minus: SqrtSumExpr
    T: int
    eps: Fraction
    h: int
    series_plus: TruncatedSeries = field(repr=False)
    series_minus: TruncatedSeries = field(repr=False)
    checks: PairCheck

    @property
    def v(self) -> int:
        return self.omega_plus.v

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "T": self.T,
            "eps": str(self.eps),
            "v": self.v,
            "omega_plus": self.omega_plus.to_json(),
            "omega_minus": self.omega_minus.to_json(),
            "series_plus": self.series_plus.to_json(),
            "series_minus": self.series_minus.to_json(),
            "checks": self.checks.to_json(),
        }


def _make_cert(wp, wm, T, eps, h, check) -> PairCert:
    return PairCert(wp, wm, T, Fraction(eps), h, wp.series(h + T), wm.series(h + T), check)


@dataclass(frozen=True)
class TooSmall:
    """Signal that v is below the threshold for the requested pair."""

    v: int
    margin: Fraction
    check: Optional[PairCheck] = None

    def __bool__(self) -> bool:
        return False


def base_expressions(v: int) -> tuple[SqrtSumExpr, SqrtSumExpr]:
    """w_{v,+-} = 2v sqrt(n^2 +- 1/v)."""
    return SqrtSumExpr((Fraction(2 * v),), v, "+"), SqrtSumExpr((Fraction(2 * v),), v, "-")


def base_pair(v: int, T: int, eps) -> PairCert | TooSmall:
    if v < 1:
        raise UsageError("base_pair needs v >= 1")
    wp, wm = base_expressions(v)
    check = is_pair(wp, wm, T, eps, 1)
    if not check:
        return TooSmall(v, check.margin, check)
    return _make_cert(wp, wm, T, eps, 1, check)


def combine(r_plus: SqrtSumExpr, r_minus: SqrtSumExpr) -> tuple[SqrtSumExpr, SqrtSumExpr]:
    """A_+ = r_+(n) + r_-(n+1) and A_- = r_+(n+1) + r_-(n).

    Shifting by one moves every term one slot up, where the other sign
    class has the same perturbation, so overlapping slots simply add.
    """
    if r_plus.v != r_minus.v or r_plus.h != r_minus.h:
        raise UsageError("combine needs expressions with the same v and length")
    m = r_plus.h
    zero = Fraction(0)
    a_plus = [x + y for x, y in zip((*r_plus.a, zero), (zero, *r_minus.a))]
    a_minus = [x + y for x, y in zip((*r_minus.a, zero), (zero, *r_plus.a))]
    assert len(a_plus) == len(a_minus) == m + 1
    return (
        SqrtSumExpr(tuple(a_plus), r_plus.v, "+"),
        SqrtSumExpr(tuple(a_minus), r_plus.v, "-"),
    )


def rescale_pair(a_plus: SqrtSumExpr, a_minus: SqrtSumExpr, m: int, T: int) -> tuple[SqrtSumExpr, SqrtSumExpr]:
    """Normalize so that l_{m+1}(omega_+) = K(m+1, 0) = -l_{m+1}(omega_-)."""
    order = m + 1 + T
    lp = a_plus.series(order).l(m + 1)
    lm = a_minus.series(order).l(m + 1)
    if lp <= 0 or lm >= 0:
        raise DegenerateError(f"leading coefficients have the wrong sign: l+={lp}, l-={lm}")
    k0 = K_coeffs(m + 1, 0)[0]
    return a_plus.scaled(k0 / lp), a_minus.scaled(-k0 / lm)


def fold(v: int, h: int, T: int) -> tuple[SqrtSumExpr, SqrtSumExpr]:
    """Run the inductive construction from the base pair up to level h."""
    wp, wm = base_expressions(v)
    for m in range(1, h):
        ap, am = combine(wp, wm)
        wp, wm = rescale_pair(ap, am, m, T + h - m - 1)
    return wp, wm


def build_pair(h: int, T: int, eps, v_schedule: Iterable[int] = DEFAULT_V_SCHEDULE) -> PairCert:
    """First v in the schedule whose folded expressions form a (T, eps, h)-pair."""
    if h < 1 or T < 1:
        raise UsageError("build_pair needs h >= 1 and T >= 1")
    eps = Fraction(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")
    best: Optional[Fraction] = None
    for v in v_schedule:
        try:
            wp, wm = fold(v, h, T)
        except DegenerateError as exc:
            log.info("v=%d degenerate: %s", v, exc)
            continue
        check = is_pair(wp, wm, T, eps, h)
        log.info("v=%d margin=%s", v, check.margin)
        if check:
            return _make_cert(wp, wm, T, eps, h, check)
        if check.vanishing and check.leading:
            best = check.margin if best is None else min(best, check.margin)
    raise NotFoundError(
        f"no (T={T}, eps={eps}, h={h})-pair in the v schedule; best margin {best}"
    )


@dataclass(frozen=True)
class Theorem1Instance:
    """sum_i sqrt(a_i^2 (n+i-1)^2 + b_i) with fractional part ~ G0 / n^k."""

    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    G0: Fraction
    v: int
    L: int

    @property
    def predicted_exponent(self) -> int:
        return self.k

    def radicands(self, n: int) -> list[int]:
        return [ai * ai * (n + i) ** 2 + bi for i, (ai, bi) in enumerate(zip(self.a, self.b))]

    def linear_part(self, n: int) -> int:
        return sum(ai * (n + i) for i, ai in enumerate(self.a))

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "a": list(self.a),
            "b": list(self.b),
            "G0": str(self.G0),
            "v": self.v,
            "L": self.L,
        }


def _minimal_scale(a: Sequence[Fraction], v: int) -> int:
    den = lcm(*(x.denominator for x in a))
    ints = [int(x * den) for x in a]
    for t in range(1, v + 1):
        if v % t == 0 and all((t * x) ** 2 % v == 0 for x in ints):
            return den * t
    raise AssertionError("t = v always clears v")


def theorem1_instance(k: int, pair: PairCert, scale_L: Optional[int] = None) -> Theorem1Instance:
    """Integer radicands from the plus element of a level-k pair.

    The auto scale is the smallest L making every L a_j an integer A_j with
    v | A_j^2, so that b_j = +-A_j^2 / v is an integer.
    """
    if pair.h != k:
        raise UsageError(f"pair has level {pair.h}, instance needs {k}")
    omega = pair.omega_plus
    v = omega.v
    L = _minimal_scale(omega.a, v) if scale_L is None else int(scale_L)
    if L < 1:
        raise UsageError("scale must be a positive integer")
    A = [L * x for x in omega.a]
    if any(x.denominator != 1 for x in A):
        raise UsageError(f"scale {L} leaves fractional outer coefficients")
    b = [x * x * omega.c(j) for j, x in enumerate(A)]
    if any(y.denominator != 1 for y in b):
        raise UsageError(f"scale {L} leaves fractional radicand offsets")
    if any(y == 0 for y in b):
        raise AssertionError("zero radicand offset")
    G0 = L * pair.series_plus.l(k)
    if G0 == 0:
        raise AssertionError("vanishing leading coefficient")
    return Theorem1Instance(k, tuple(int(x) for x in A), tuple(int(y) for y in b), G0, v, L)


@dataclass(frozen=True)
class VerifyRow:
    n: int
    err: DyadicInterval
    scaled: Fraction  # n^k * err.mid

    def csv_fields(self) -> list[str]:
        return [
            str(self.n),
            to_decimal(self.err.lo, 12, decimal.ROUND_FLOOR, "E"),
            to_decimal(self.err.hi, 12, decimal.ROUND_CEILING, "E"),
            to_decimal(self.scaled, 12),
        ]


@dataclass(frozen=True)
class VerifyResult:
    instance: Theorem1Instance
    rows: list[VerifyRow]
    slope: Optional[float]


def _sum_enclosure(radicands: Sequence[int], offset: int, bits: int) -> DyadicInterval:
    total = DyadicInterval.point(-offset)
    for r in radicands:
        total = total + sqrt_enclosure(r, bits)
    return total


def instance_error(inst: Theorem1Instance, n: int, bits: int = 128, budget: int = 4096) -> DyadicInterval:
    """Certified || sum_i sqrt(a_i^2 (n+i-1)^2 + b_i) ||, refined to relative width 2^-40."""
    rad = inst.radicands(n)
    if any(r < 0 for r in rad):
        raise UsageError(f"negative radicand at n={n}")
    base = inst.linear_part(n)
    while True:
        enc = _sum_enclosure(rad, base, bits)
        fl = floor(enc.lo)
        if fl == floor(enc.hi):
            frac = enc - fl
            half = Fraction(1, 2)
            if frac.hi <= half:
                d = frac
            elif frac.lo >= half:
                d = DyadicInterval(1 - frac.hi, 1 - frac.lo)
            else:
                d = None
            if d is not None and d.lo > 0 and d.width * (1 << 40) <= d.lo:
                return d
        if bits >= budget:
            raise BudgetExceededError(f"instance error at n={n} undecided at {bits} bits", enc)
        bits = min(2 * bits, budget)


def fit_slope(ns: Sequence[int], values: Sequence[Fraction]) -> Optional[float]:
    """Least-squares slope of log(value) against log(n)."""
    pts = [(n, v) for n, v in zip(ns, values) if v > 0]
    if len(pts) < 2:
        return None
    x = np.log([float(n) for n, _ in pts])
    y = np.array([_log_fraction(v) for _, v in pts])
    return float(np.polyfit(x, y, 1)[0])


def _log_fraction(x: Fraction) -> float:
    # log of tiny rationals without float underflow
    e = x.numerator.bit_length() - x.denominator.bit_length()
    return float(np.log(float(x / Fraction(2) ** e))) + e * float(np.log(2.0))


def theorem1_verify(inst: Theorem1Instance, n_list: Sequence[int], bits: int = 128) -> VerifyResult:
    if not n_list:
        raise UsageError("n_list must be nonempty")
    if list(n_list) != sorted(n_list) or n_list[0] < 1:
        raise UsageError("n_list must be ascending positive integers")
    rows = []
    for n in n_list:
        err = instance_error(inst, n, bits)
        rows.append(VerifyRow(n, err, err.mid * n**inst.k))
    slope = fit_slope([r.n for r in rows], [r.err.mid for r in rows])
    return VerifyResult(inst, rows, slope)
