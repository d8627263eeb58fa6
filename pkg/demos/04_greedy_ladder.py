"""Greedy ladder descent: approach a target from below, level by level.

Run: python demos/04_greedy_ladder.py
"""

from __future__ import annotations

from fractions import Fraction

from rootsum.evaluation import to_decimal
from rootsum.greedy import build_ladder, greedy_descent, shift_to_positive
from rootsum.ring import make_basis

basis = make_basis(1)
ladder = build_ladder(basis, 8)
for e in ladder:
    print(f"level {e.j}: x = {e.x!s:12s} {{x}} <= {to_decimal(e.frac.hi, 4)}")

alpha = Fraction(1, 3)
g = greedy_descent(alpha, ladder, height_cap=200)
print(f"\nalpha = {alpha}: digits y = {g.y}, omega = {g.omega}")
print(f"  residual alpha - {{omega}} in {g.residual} (never negative)")
print(f"  height used {g.height_used}, depth t = {g.t}")

# Recentering gives strictly positive coefficients, i.e. actual sqrt(b).
s = shift_to_positive(alpha, basis, 400)
print(f"\nshift to positive: d = {s.d}, error {s.err}")
