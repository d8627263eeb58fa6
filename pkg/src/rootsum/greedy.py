"""Greedy ladder descent: approximate a target from below by {omega}.

A ladder holds, for j = 1, 2, ..., an element x_j of S_tau with height at
most 2**j and 0 < {x_j} <= (2**j)**-(2**tau - 1).  Descent subtracts the
largest multiple y_h {x_h} that keeps the residual non-negative, level by
level, so the residual after level t is below {x_t}.

Every residual is carried as an exact field element: {x_h} = x_h + k_h with
k_h = -floor(x_h), hence alpha_h = alpha - omega_h - sum y_i k_i.  Digits are
therefore decided by exact sign tests and never depend on rounding.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .errors import UsageError
from .evaluation import (
    DEFAULT_BIT_BUDGET,
    DyadicInterval,
    dist_to_int,
    enclose_to_relative,
    eval_enclosure,
    format_dyadic,
    frac_enclosure,
    parse_dyadic,
    sign,
)
from .pigeonhole import DEFAULT_ENUM_CAP, certified_dist_lower_bound, dirichlet_search
from .ring import (
    Basis,
    QuadInt,
    QuadNumber,
    QuadRat,
    height,
    make_basis,
    quad_from_json,
)

log = logging.getLogger(__name__)

Target = Union[Fraction, QuadNumber]


@dataclass(frozen=True)
class LadderEntry:
    j: int
    x: QuadInt
    frac: DyadicInterval
    lower_cert: Fraction

    @property
    def level_bound(self) -> Fraction:
        return Fraction(1, (2**self.j) ** (self.x.basis.size - 1))

    def to_json(self) -> dict:
        return {
            "tau": self.x.basis.tau,
            "j": self.j,
            "x": self.x.to_json(),
            "frac": self.frac.to_json(),
            "lower_cert": format_dyadic(self.lower_cert),
        }

    @classmethod
    def from_json(cls, data) -> LadderEntry:
        return cls(
            int(data["j"]),
            QuadInt.from_json(data["x"]),
            DyadicInterval.from_json(data["frac"]),
            parse_dyadic(data["lower_cert"]),
        )


def ladder_entry(
    basis: Basis,
    j: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> LadderEntry:
    n = 2**j
    wit = dirichlet_search(basis, n, enum_cap, jobs=jobs, budget=budget)
    x = wit.w
    # {x} = ||x|| after flipping the sign when the fractional part exceeds 1/2
    if frac_enclosure(x, Fraction(1, 1 << 20), budget).frac.lo > Fraction(1, 2):
        x = -x
    lower = certified_dist_lower_bound(x, n)
    width = min(lower / 4, Fraction(1, 1 << 64))
    while True:
        fr = frac_enclosure(x, width, budget)
        if fr.frac.lo >= lower:
            break
        width /= 1 << 32
    entry = LadderEntry(j, x, fr.frac, lower)
    if not (0 < entry.lower_cert <= entry.frac.lo and entry.frac.hi <= entry.level_bound):
        raise AssertionError(f"ladder level {j} failed its certificate: {entry}")
    return entry


def build_ladder(
    basis: Basis,
    levels: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    jobs: int = 1,
    budget: int = DEFAULT_BIT_BUDGET,
) -> list[LadderEntry]:
    """Ladder entries for j = 1..levels."""
    return [ladder_entry(basis, j, enum_cap, jobs, budget) for j in range(1, levels + 1)]


def max_feasible_level(basis: Basis, enum_cap: int) -> int:
    dim = basis.size - 1
    j = 0
    while (2 ** (j + 1)) ** dim <= enum_cap:
        j += 1
    return j


class LadderCache:
    """Ladder entries persisted as JSON lines, one file per (tau, enum_cap).

    A larger cap can change which witness the search picks, so the cap is part
    of the key.  Writes go through a temporary file and an atomic rename.
    """

    def __init__(self, directory, enum_cap: int = DEFAULT_ENUM_CAP, jobs: int = 1,
                 budget: int = DEFAULT_BIT_BUDGET):
        self.directory = Path(directory)
        self.enum_cap = enum_cap
        self.jobs = jobs
        self.budget = budget

    def path(self, tau: int) -> Path:
        return self.directory / f"ladder_tau{tau}_cap{self.enum_cap}.jsonl"

    def load(self, tau: int) -> dict[int, LadderEntry]:
        p = self.path(tau)
        entries: dict[int, LadderEntry] = {}
        if not p.exists():
            return entries
        with p.open() as fh:
            for line in fh:
                line = line.strip()
                if line:
                    e = LadderEntry.from_json(json.loads(line))
                    entries[e.j] = e
        return entries

    def _write(self, tau: int, entries: dict[int, LadderEntry]) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            for j in sorted(entries):
                fh.write(json.dumps(entries[j].to_json(), sort_keys=True) + "\n")
        os.replace(tmp, self.path(tau))

    def get(self, basis: Basis, levels: int) -> list[LadderEntry]:
        entries = self.load(basis.tau)
        missing = [j for j in range(1, levels + 1) if j not in entries]
        for j in missing:
            log.info("building ladder level tau=%d j=%d", basis.tau, j)
            entries[j] = ladder_entry(basis, j, self.enum_cap, self.jobs, self.budget)
        if missing:
            self._write(basis.tau, entries)
        return [entries[j] for j in range(1, levels + 1)]

    __call__ = get


LadderSource = Callable[[Basis, int], Sequence[LadderEntry]]


def default_ladder_source(enum_cap: int = DEFAULT_ENUM_CAP, jobs: int = 1,
                          budget: int = DEFAULT_BIT_BUDGET) -> LadderSource:
    def source(basis: Basis, levels: int) -> list[LadderEntry]:
        return build_ladder(basis, levels, enum_cap, jobs, budget)

    return source


@dataclass(frozen=True)
class GreedyResult:
    omega: QuadInt
    y: list[int]
    residual: DyadicInterval
    t: int
    height_used: int
    residual_exact: QuadRat = field(repr=False)
    alphas: list[DyadicInterval] = field(default_factory=list, repr=False)
    coeff_bound: list[int] = field(default_factory=list, repr=False)

    @property
    def bound(self) -> Fraction:
        dim = self.omega.basis.size - 1
        return Fraction(1, (2**self.t) ** dim)


def _as_element(alpha: Target, basis: Basis) -> QuadRat:
    if isinstance(alpha, QuadNumber):
        basis.check_same(alpha.basis)
        return QuadRat(basis, alpha.coeffs)
    return QuadRat.from_int(basis, Fraction(alpha))


def _enclose(w: QuadNumber, budget: int) -> DyadicInterval:
    if w.is_rational():
        c = Fraction(w.coeffs[0])
        if c.denominator & (c.denominator - 1) == 0:
            return DyadicInterval.point(c)
        return eval_enclosure(w, 96)
    return enclose_to_relative(w, 64, budget)


def greedy_descent(
    alpha: Target,
    ladder: Sequence[LadderEntry],
    height_cap: int,
    budget: int = DEFAULT_BIT_BUDGET,
) -> GreedyResult:
    """Approximate ``alpha`` in [0, 1) from below by {omega}, height(omega) <= height_cap.

    ``alpha`` is an exact rational or an exact field element.  Levels are
    consumed in order until adding the next digit would push the height of
    omega past ``height_cap``.
    """
    if not ladder:
        raise UsageError("greedy_descent needs a nonempty ladder")
    basis = ladder[0].x.basis
    target = _as_element(alpha, basis)
    fr = frac_enclosure(target, Fraction(1, 1 << 20), budget)
    if fr.int_part != 0:
        raise UsageError(f"target must lie in [0, 1), got integer part {fr.int_part}")

    omega = QuadInt.zero(basis)
    shift = 0  # sum of y_h k_h
    ys: list[int] = []
    coeff_bound = [0] * basis.size
    alphas = [_enclose(target, budget)]
    t = 0
    for entry in ladder:
        x = entry.x
        k = -frac_enclosure(x, Fraction(1, 1 << 20), budget).int_part
        frac_x = x + k
        resid = target - omega - shift
        r = _enclose(resid, budget)
        y = max(0, int(r.mid / entry.frac.mid))
        while sign(resid - (y + 1) * frac_x, budget) >= 0:
            y += 1
        while y > 0 and sign(resid - y * frac_x, budget) < 0:
            y -= 1
        candidate = omega + y * x
        if height(candidate) > height_cap:
            break
        omega = candidate
        shift += y * k
        ys.append(y)
        coeff_bound = [b + y * abs(c) for b, c in zip(coeff_bound, x.coeffs)]
        t += 1
        alphas.append(_enclose(target - omega - shift, budget))
    residual_exact = target - omega - shift
    return GreedyResult(
        omega=omega,
        y=ys,
        residual=alphas[-1],
        t=t,
        height_used=int(height(omega)),
        residual_exact=residual_exact,
        alphas=alphas,
        coeff_bound=coeff_bound,
    )


@dataclass(frozen=True)
class ShiftResult:
    """Positive coefficients d_f with sum d_f sqrt(f) close to the target mod 1."""

    d: dict[int, int]
    n: int
    kappa: QuadInt
    greedy: GreedyResult
    err: DyadicInterval
    constant: Fraction

    def element(self) -> QuadInt:
        return QuadInt.from_dict(self.kappa.basis, self.d)


def shift_to_positive(
    alpha: Fraction,
    basis: Basis,
    n: int,
    enum_cap: int = DEFAULT_ENUM_CAP,
    ladder_source: Optional[LadderSource] = None,
    budget: int = DEFAULT_BIT_BUDGET,
) -> ShiftResult:
    """Coefficients floor(n/2) - floor(n/3) <= d_f <= floor(n/2) + floor(n/3).

    Recenters at rho = floor(n/2) * sum sqrt(f), descends on {alpha - rho}
    with height cap floor(n/3), and shifts the result back.
    """
    if n < 6:
        raise UsageError(f"shift_to_positive needs n >= 6, got {n}")
    alpha = Fraction(alpha)
    half, third = n // 2, n // 3
    dim = basis.size - 1
    rho = QuadInt(basis, [0] + [half] * dim)
    diff = QuadRat.from_int(basis, alpha) - rho
    alpha0 = diff - frac_enclosure(diff, Fraction(1, 1 << 20), budget).int_part

    levels = min(third.bit_length(), max_feasible_level(basis, enum_cap))
    if levels < 1:
        raise UsageError(f"enum_cap={enum_cap} cannot host even the first ladder level")
    source = ladder_source or default_ladder_source(enum_cap, budget=budget)
    ladder = list(source(basis, levels))
    res = greedy_descent(alpha0, ladder, third, budget)
    kappa = res.omega
    d = {f: half + c for f, c in zip(basis.nonunit_products, kappa.coeffs[1:])}
    if not all(half - third <= v <= half + third and 0 < v <= n for v in d.values()):
        raise AssertionError(f"shifted coefficients out of range: {d}")
    total = QuadRat(basis, [0, *d.values()]) - alpha
    err = dist_to_int(total, Fraction(1, 1 << 64) * res.bound, budget)
    return ShiftResult(d, n, kappa, res, err, err.hi * n**dim)


def ladder_json_lines(entries: Sequence[LadderEntry]) -> str:
    return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in entries)


def ladder_from_json_lines(text: str) -> list[LadderEntry]:
    return [LadderEntry.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]


__all__ = [
    "GreedyResult",
    "LadderCache",
    "LadderEntry",
    "ShiftResult",
    "build_ladder",
    "default_ladder_source",
    "greedy_descent",
    "ladder_entry",
    "make_basis",
    "quad_from_json",
    "shift_to_positive",
]
