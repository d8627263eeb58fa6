"""Exact arithmetic in Z[sqrt(p1), ..., sqrt(p_tau)] and its fraction field.

Elements are stored as dense coefficient vectors over the Besicovitch basis
{sqrt(f) : f squarefree, f | p1*...*p_tau}, ordered by increasing f.  Those
square roots are linearly independent over Q, so two elements are equal
exactly when their coefficient vectors are equal.

>>> B = make_basis(2)
>>> w = QuadInt.from_dict(B, {1: 1, 2: 1, 3: 1, 6: 1})
>>> w * w
QuadInt(tau=2, 12 + 8√2 + 6√3 + 4√6)
>>> field_norm(QuadInt.from_dict(B, {2: 1, 3: 1}))
1
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, prod
from typing import Iterable, Mapping, Sequence, Union

from .errors import UsageError

#: Hard cap on the number of primes.  Arithmetic is fine past this, but every
#: search downstream scales like n**(2**tau - 1).
MAX_TAU = 6

Scalar = Union[int, Fraction]


def first_primes(count: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


@dataclass(frozen=True)
class Basis:
    """The first ``tau`` primes and the sorted squarefree products they generate."""

    tau: int
    primes: tuple[int, ...]
    products: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.products)

    @property
    def nonunit_products(self) -> tuple[int, ...]:
        """P_tau without 1, i.e. the radicands of S_tau."""
        return self.products[1:]

    @cached_property
    def index(self) -> dict[int, int]:
        return {f: i for i, f in enumerate(self.products)}

    @cached_property
    def prime_masks(self) -> tuple[int, ...]:
        # bit j set iff primes[j] divides products[i]
        return tuple(
            sum(1 << j for j, p in enumerate(self.primes) if f % p == 0)
            for f in self.products
        )

    @cached_property
    def mul_table(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        # sqrt(f) * sqrt(g) = gcd(f, g) * sqrt(f g / gcd(f, g)^2)
        rows = []
        for f in self.products:
            row = []
            for g in self.products:
                d = gcd(f, g)
                row.append((self.index[f * g // (d * d)], d))
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def radical(self) -> int:
        return prod(self.primes)

    def check_same(self, other: Basis) -> None:
        if self.tau != other.tau:
            raise UsageError(f"mixed bases: tau={self.tau} and tau={other.tau}")


@lru_cache(maxsize=None)
def make_basis(tau: int) -> Basis:
    if not isinstance(tau, int) or not 1 <= tau <= MAX_TAU:
        raise UsageError(f"tau must be an integer in [1, {MAX_TAU}], got {tau!r}")
    primes = first_primes(tau)
    products = sorted(
        prod(subset)
        for r in range(tau + 1)
        for subset in itertools.combinations(primes, r)
    )
    return Basis(tau, tuple(primes), tuple(products))


def _format_scalar(c: Scalar) -> str:
    if isinstance(c, Fraction) and c.denominator == 1:
        return str(c.numerator)
    return str(c)


class QuadNumber:
    """An element sum_f c_f sqrt(f) over a fixed basis.

    Instances are immutable.  Use :class:`QuadInt` for integer coefficients and
    :class:`QuadRat` for rationals; arithmetic returns a ``QuadInt`` only when
    every operand (and scalar) is integral.
    """

    __slots__ = ("basis", "coeffs")

    basis: Basis
    coeffs: tuple

    def __init__(self, basis: Basis, coeffs: Sequence[Scalar]):
        if len(coeffs) != basis.size:
            raise UsageError(
                f"expected {basis.size} coefficients for tau={basis.tau}, got {len(coeffs)}"
            )
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", self._normalize(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @staticmethod
    def _normalize(coeffs: Sequence[Scalar]) -> tuple:
        raise NotImplementedError

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, basis: Basis):
        return cls(basis, [0] * basis.size)

    @classmethod
    def from_int(cls, basis: Basis, value: Scalar):
        coeffs = [0] * basis.size
        coeffs[0] = value
        return cls(basis, coeffs)

    @classmethod
    def from_dict(cls, basis: Basis, mapping: Mapping[int, Scalar]):
        coeffs: list[Scalar] = [0] * basis.size
        for f, c in mapping.items():
            if f not in basis.index:
                raise UsageError(f"{f} is not a squarefree divisor of {basis.radical}")
            coeffs[basis.index[f]] = c
        return cls(basis, coeffs)

    @classmethod
    def sqrt(cls, basis: Basis, f: int):
        return cls.from_dict(basis, {f: 1})

    # -- views ------------------------------------------------------------

    def coeff(self, f: int) -> Scalar:
        return self.coeffs[self.basis.index[f]]

    def as_dict(self) -> dict[int, Scalar]:
        return {f: c for f, c in zip(self.basis.products, self.coeffs) if c}

    @property
    def rational_part(self) -> Scalar:
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return type(self)(self.basis, [-c for c in self.coeffs])

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _coerce_scalar(self.basis, other)
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return linear_combine([(1, self), (1, other)])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _coerce_scalar(self.basis, other)
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return linear_combine([(1, self), (-1, other)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return linear_combine([(other, self)])
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, QuadNumber):
            return NotImplemented
        return self.basis.tau == other.basis.tau and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.basis.tau, self.coeffs))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(tau={self.basis.tau}, {self})"

    def __str__(self) -> str:
        parts = []
        for f, c in zip(self.basis.products, self.coeffs):
            if not c:
                continue
            mag = abs(c)
            if f == 1:
                body = _format_scalar(mag)
            elif mag == 1:
                body = f"√{f}"
            elif isinstance(mag, Fraction) and mag.denominator != 1:
                body = f"({mag})√{f}"
            else:
                body = f"{_format_scalar(mag)}√{f}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "tau": self.basis.tau,
            "coeffs": {str(f): _format_scalar(c) for f, c in self.as_dict().items()},
        }

    @classmethod
    def from_json(cls, data: Mapping):
        basis = make_basis(int(data["tau"]))
        mapping = {int(f): _parse_scalar(s) for f, s in data.get("coeffs", {}).items()}
        return cls.from_dict(basis, mapping)


class QuadInt(QuadNumber):
    """Element of Z[sqrt(p1), ..., sqrt(p_tau)]."""

    __slots__ = ()

    @staticmethod
    def _normalize(coeffs):
        out = []
        for c in coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise UsageError(f"QuadInt coefficient {c} is not an integer")
                c = c.numerator
            elif not isinstance(c, int):
                raise UsageError(f"QuadInt coefficient {c!r} is not an integer")
            out.append(int(c))
        return tuple(out)


class QuadRat(QuadNumber):
    """Element of Q(sqrt(p1), ..., sqrt(p_tau)); coefficients kept in lowest terms."""

    __slots__ = ()

    @staticmethod
    def _normalize(coeffs):
        return tuple(Fraction(c) for c in coeffs)


def _parse_scalar(text: str) -> Scalar:
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


def _coerce_scalar(basis: Basis, value: Scalar) -> QuadNumber:
    if isinstance(value, int):
        return QuadInt.from_int(basis, value)
    return QuadRat.from_int(basis, value)


def quad_from_json(data: Mapping) -> QuadNumber:
    """Deserialize, choosing QuadInt when every coefficient is integral."""
    values = [_parse_scalar(s) for s in data.get("coeffs", {}).values()]
    if all(isinstance(v, int) for v in values):
        return QuadInt.from_json(data)
    return QuadRat.from_json(data)


def _result_type(elements: Iterable[QuadNumber], scalars: Iterable[Scalar] = ()):
    if all(isinstance(e, QuadInt) for e in elements) and all(
        isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1)
        for s in scalars
    ):
        return QuadInt
    return QuadRat


def linear_combine(terms: Sequence[tuple[Scalar, QuadNumber]]) -> QuadNumber:
    """Coefficientwise sum of ``scalar * element`` over all terms."""
    if not terms:
        raise UsageError("linear_combine needs at least one term")
    basis = terms[0][1].basis
    for _, e in terms:
        basis.check_same(e.basis)
    cls = _result_type([e for _, e in terms], [s for s, _ in terms])
    acc: list[Scalar] = [0] * basis.size
    for s, e in terms:
        if s == 0:
            continue
        for i, c in enumerate(e.coeffs):
            if c:
                acc[i] += s * c
    return cls(basis, acc)


def mul(w1: QuadNumber, w2: QuadNumber) -> QuadNumber:
    w1.basis.check_same(w2.basis)
    basis = w1.basis
    table = basis.mul_table
    acc: list[Scalar] = [0] * basis.size
    for i, a in enumerate(w1.coeffs):
        if not a:
            continue
        row = table[i]
        for j, b in enumerate(w2.coeffs):
            if b:
                k, factor = row[j]
                acc[k] += factor * a * b
    return _result_type([w1, w2])(basis, acc)


def height(w: QuadNumber) -> Scalar:
    """Largest absolute coordinate, M(w); zero only for w = 0."""
    return max(abs(c) for c in w.coeffs)


def galois_conjugate(w: QuadNumber, s: Sequence[int]) -> QuadNumber:
    """Apply the automorphism sqrt(p_j) -> (-1)**s_j sqrt(p_j)."""
    basis = w.basis
    if len(s) != basis.tau:
        raise UsageError(f"sign vector has length {len(s)}, expected tau={basis.tau}")
    smask = sum(1 << j for j, bit in enumerate(s) if bit)
    return _conjugate_mask(w, smask)


def _conjugate_mask(w: QuadNumber, smask: int) -> QuadNumber:
    masks = w.basis.prime_masks
    return type(w)(
        w.basis,
        [-c if bin(m & smask).count("1") & 1 else c for c, m in zip(w.coeffs, masks)],
    )


def sign_vectors(tau: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=tau))


def conjugates(w: QuadNumber) -> list[QuadNumber]:
    """All 2**tau conjugates, starting with w itself."""
    return [galois_conjugate(w, s) for s in sign_vectors(w.basis.tau)]


def field_norm(w: QuadNumber) -> Scalar:
    """Product of all conjugates, returned as its rational value.

    The product is formed in tau steps: multiplying u by its conjugate under
    sqrt(p_j) -> -sqrt(p_j) yields an element free of p_j, and after running
    through every prime the accumulated product covers all 2**tau sign
    vectors exactly once.
    """
    u = w
    for j in range(w.basis.tau):
        u = mul(u, _conjugate_mask(u, 1 << j))
    if not u.is_rational():
        raise AssertionError(f"norm of {w} has irrational part {u}; Galois invariance broken")
    return u.coeffs[0]
