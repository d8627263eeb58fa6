"""Small fractional parts in S_tau by exhaustive pigeonhole search.

The search side works with 64-bit fixed-point fractional parts: since the
coefficients are integers, {sum d_f sqrt(f)} only depends on d_f * {sqrt(f)}
mod 1, and uint64 arithmetic wraps modulo 2**64 for free.  Each key is off
by fewer than sum |d_f| + 1 ulps, far below the gaps being compared; the
final choice among near-ties is always made with certified exact
enclosures.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import CapacityError, UsageError
from .evaluation import (
    DEFAULT_BIT_BUDGET,
    DyadicInterval,
    dist_to_int,
    dyadic_floor,
    eval_enclosure,
    nearest_integer,
)
from .ring import Basis, QuadInt, QuadNumber, conjugates, height

DEFAULT_ENUM_CAP = 8_000_000
KEY_BITS = 64
_KEY_MOD = 1 << KEY_BITS


@dataclass(frozen=True)
class SmallFracWitness:
    w: QuadInt
    height_bound: int
    dist: DyadicInterval
    certified_upper: Fraction

    def to_json(self) -> dict:
        dim = self.w.basis.size - 1
        return {
            "w": self.w.to_json(),
            "height_bound": self.height_bound,
            "dist": self.dist.to_json(),
            "bound": f"n^-(2^tau-1) = {self.height_bound}^-{dim}",
            "certified": self.certified_upper <= Fraction(1, self.height_bound**dim),
        }


def _frac_steps(basis: Basis) -> list[int]:
    # floor({sqrt f} * 2^64) for every f in P_tau*
    return [isqrt(f << (2 * KEY_BITS)) % _KEY_MOD for f in basis.nonunit_products]


def _box_keys(steps: list[int], ranges: list[tuple[int, int]]) -> np.ndarray:
    """Fixed-point fractional parts over a box, row-major (last coordinate fastest)."""
    keys = np.zeros(1, dtype=np.uint64)
    for s, (a, b) in zip(steps, ranges):
        vals = np.arange(a, b + 1, dtype=np.int64).astype(np.uint64) * np.uint64(s)
        keys = (keys[:, None] + vals[None, :]).ravel()
    return keys


def _split_range(a: int, b: int, parts: int) -> list[tuple[int, int]]:
    size = b - a + 1
    parts = max(1, min(parts, size))
    bounds = [a + (size * i) // parts for i in range(parts + 1)]
    return [(bounds[i], bounds[i + 1] - 1) for i in range(parts)]


def _enumerate(steps: list[int], lo: int, hi: int, jobs: int) -> np.ndarray:
    """Keys of the whole box [lo, hi]^dim, partitioned on the first coordinate.

    Partitions are concatenated in coordinate order, so the output array is
    the same for every ``jobs`` value.
    """
    dim = len(steps)
    chunks = _split_range(lo, hi, jobs)
    tasks = [[c] + [(lo, hi)] * (dim - 1) for c in chunks]
    if len(tasks) == 1:
        return _box_keys(steps, tasks[0])
    with ThreadPoolExecutor(max_workers=len(tasks)) as pool:
        parts = list(pool.map(lambda r: _box_keys(steps, r), tasks))
    return np.concatenate(parts)


def _decode(index: int, dim: int, lo: int, hi: int) -> list[int]:
    radix = hi - lo + 1
    digits = []
    for _ in range(dim):
        index, r = divmod(index, radix)
        digits.append(lo + r)
    return digits[::-1]


def _element(basis: Basis, vector: list[int]) -> QuadInt:
    return QuadInt(basis, [0, *vector])


def sign_canonical(w: QuadNumber) -> QuadNumber:
    """Flip sign so the first nonzero irrational coefficient is positive."""
    for c in w.coeffs[1:]:
        if c:
            return w if c > 0 else -w
    return w


def _lex_key(w: QuadNumber) -> tuple:
    return tuple(w.coeffs[1:])


def certified_argmin_dist(
    candidates: list[QuadNumber], budget: int = DEFAULT_BIT_BUDGET
) -> tuple[QuadNumber, DyadicInterval]:
    """Candidate with the smallest distance to Z, decided by certified enclosures.

    Distinct elements of S_tau up to sign never have equal distances, so only
    sign pairs can tie; those are folded together beforehand and the
    lexicographically smallest representative wins.
    """
    unique = sorted({sign_canonical(w) for w in candidates}, key=_lex_key)
    width = Fraction(1, 1 << 80)
    while True:
        dists = [(dist_to_int(w, width, budget), w) for w in unique]
        best_hi = min(d.hi for d, _ in dists)
        contenders = [(d, w) for d, w in dists if d.lo <= best_hi]
        if len(contenders) == 1:
            return contenders[0][1], contenders[0][0]
        unique = [w for _, w in contenders]
        width /= 1 << 64
        if width < Fraction(1, 1 << (budget - 8)):
            # cannot happen for distinct elements; keep the lexicographic order
            return contenders[0][1], contenders[0][0]


def _certify_upper(w: QuadNumber, bound: Fraction, budget: int) -> DyadicInterval:
    width = min(bound / 1024, Fraction(1, 1 << 40))
    while True:
        d = dist_to_int(w, width, budget)
        if d.hi <= bound or d.lo > bound:
            return d
        width /= 1 << 32


def dirichlet_search(
    basis: Basis,
    n: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> SmallFracWitness:
    """Nonzero w in S_tau with height <= n and ||w|| <= n**-(2**tau - 1).

    Sorts the fractional parts of A_n = {sum d_f sqrt f : 1 <= d_f <= n}
    together with 0 around the circle and returns the difference of the
    closest adjacent pair.
    """
    return _dirichlet_cached(basis.tau, n, enum_cap, budget, jobs)


@lru_cache(maxsize=256)
def _dirichlet_cached(tau: int, n: int, enum_cap: int, budget: int, jobs: int) -> SmallFracWitness:
    from .ring import make_basis

    basis = make_basis(tau)
    if n < 1:
        raise UsageError("dirichlet_search needs n >= 1")
    dim = basis.size - 1
    count = n**dim
    if count > enum_cap:
        raise CapacityError(count, enum_cap)
    steps = _frac_steps(basis)
    keys = np.concatenate([np.zeros(1, dtype=np.uint64), _enumerate(steps, 1, n, jobs)])
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    gaps = np.diff(sk)
    wrap_gap = int(sk[0]) + _KEY_MOD - int(sk[-1])
    min_gap = min(int(gaps.min()), wrap_gap) if gaps.size else wrap_gap
    slack = 2 * (dim * n + 2)
    limit = min_gap + slack
    positions = np.nonzero(gaps <= np.uint64(min(limit, _KEY_MOD - 1)))[0].tolist()
    pairs = [(int(order[i]), int(order[i + 1])) for i in positions]
    if wrap_gap <= limit:
        pairs.append((int(order[-1]), int(order[0])))

    def vector(idx: int) -> list[int]:
        return [0] * dim if idx == 0 else _decode(idx - 1, dim, 1, n)

    candidates = []
    for a, b in pairs:
        va, vb = vector(a), vector(b)
        candidates.append(_element(basis, [y - x for x, y in zip(va, vb)]))
    w, _ = certified_argmin_dist(candidates, budget)
    bound = Fraction(1, count)
    dist = _certify_upper(w, bound, budget)
    if dist.hi > bound:
        raise AssertionError(f"pigeonhole witness {w} misses the bound {bound}")
    return SmallFracWitness(w, n, dist, dist.hi)


def brute_min_dist(
    basis: Basis,
    n: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> tuple[QuadInt, DyadicInterval]:
    """Exact minimizer of ||w|| over nonzero w in S_tau with height <= n.

    Ties (only w and -w can tie) resolve to the sign-canonical vector.  The
    returned distance is certified to width <= 2**-160, comfortably inside
    the 2**-40 contract and tight enough to sit above lower bounds from
    :func:`certified_dist_lower_bound`, which can be exact up to rounding.
    """
    if n < 1:
        raise UsageError("brute_min_dist needs n >= 1")
    dim = basis.size - 1
    count = (2 * n + 1) ** dim - 1
    if count > enum_cap:
        raise CapacityError(count, enum_cap)
    steps = _frac_steps(basis)
    keys = _enumerate(steps, -n, n, jobs)
    zero_index = ((2 * n + 1) ** dim - 1) // 2
    dk = np.minimum(keys, np.uint64(0) - keys)
    dk[zero_index] = np.uint64(_KEY_MOD - 1)
    best = int(dk.min())
    slack = 2 * (dim * n + 2)
    idx = np.nonzero(dk <= np.uint64(min(best + slack, _KEY_MOD - 1)))[0].tolist()
    candidates = [_element(basis, _decode(i, dim, -n, n)) for i in idx]
    w, _ = certified_argmin_dist(candidates, budget)
    return w, dist_to_int(w, Fraction(1, 1 << 160), budget)


def certified_dist_lower_bound(w: QuadInt, n: int, bits: int = 64) -> Fraction:
    """Positive dyadic L with ||w|| >= L.

    With d the nearest integer to w, |N(w - d)| >= 1 for the field norm N, so
    ||w|| = |w - d| >= 1 / prod over nontrivial conjugates |sigma(w - d)|.
    """
    if w.is_zero() or w.coeffs[0] != 0:
        raise UsageError("certified_dist_lower_bound needs w in S_tau*, i.e. nonzero with c_1 = 0")
    if height(w) > n:
        raise UsageError(f"height {height(w)} exceeds n={n}")
    d = nearest_integer(w)
    u = w - d
    upper = Fraction(1)
    for conj in conjugates(u)[1:]:
        upper *= eval_enclosure(conj, bits).abs_upper()
    extra = max(0, upper.numerator.bit_length() - upper.denominator.bit_length())
    return dyadic_floor(1 / upper, bits + extra)


def box_best_approx(
    basis: Basis,
    lo: int,
    hi: int,
    alpha: Fraction,
    enum_cap: int = DEFAULT_ENUM_CAP,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> tuple[QuadInt, DyadicInterval]:
    """Exact minimizer of ||w - alpha|| over w = sum c_f sqrt(f), lo <= c_f <= hi.

    Ties are broken by the lexicographically smallest coefficient vector.
    """
    if lo > hi:
        raise UsageError(f"empty box [{lo}, {hi}]")
    dim = basis.size - 1
    count = (hi - lo + 1) ** dim
    if count > enum_cap:
        raise CapacityError(count, enum_cap)
    alpha = Fraction(alpha)
    a_key = (alpha - (alpha.numerator // alpha.denominator)) * _KEY_MOD
    a_key = a_key.numerator // a_key.denominator
    keys = _enumerate(_frac_steps(basis), lo, hi, jobs) - np.uint64(a_key)
    dk = np.minimum(keys, np.uint64(0) - keys)
    best = int(dk.min())
    slack = 2 * (dim * max(abs(lo), abs(hi)) + 3)
    idx = np.nonzero(dk <= np.uint64(min(best + slack, _KEY_MOD - 1)))[0].tolist()
    cands = sorted((_element(basis, _decode(i, dim, lo, hi)) for i in idx), key=_lex_key)
    width = Fraction(1, 1 << 80)
    while True:
        dists = [(dist_to_int(w - alpha, width, budget), w) for w in cands]
        best_hi = min(d.hi for d, _ in dists)
        contenders = [(d, w) for d, w in dists if d.lo <= best_hi]
        if len(contenders) == 1 or width < Fraction(1, 1 << (budget - 8)):
            w = contenders[0][1]
            return w, dist_to_int(w - alpha, Fraction(1, 1 << 160), budget)
        cands = [w for _, w in contenders]
        width /= 1 << 64
