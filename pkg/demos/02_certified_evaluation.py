"""Dyadic enclosures, fractional parts and exact signs.

Run: python demos/02_certified_evaluation.py
"""

from __future__ import annotations

from fractions import Fraction

from rootsum.evaluation import dist_to_int, eval_enclosure, frac_enclosure, sign
from rootsum.ring import QuadInt, make_basis

b = make_basis(1)
w = QuadInt.from_dict(b, {2: 29})  # 29 sqrt 2 = 41.0121...

for bits in (8, 32, 96):
    enc = eval_enclosure(w, bits)
    print(f"{bits:3d} bits: {enc}  width {float(enc.width):.3g}")

fr = frac_enclosure(w, Fraction(1, 1 << 60))
print("integer part", fr.int_part, "fractional part", fr.frac)
print("||29 sqrt 2|| in", dist_to_int(w))

# Signs are exact: precision escalates until zero is excluded.
close = QuadInt.from_dict(b, {1: -1393, 2: 985})  # 985 sqrt 2 - 1393 ~ 3.6e-4
print("sign(985 sqrt 2 - 1393) =", sign(close))
