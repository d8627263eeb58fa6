"""Exact arithmetic in Q(sqrt 2, sqrt 3) and the norm lower bound.

Run: python demos/01_field_arithmetic.py
"""

from __future__ import annotations

from rootsum.ring import QuadInt, conjugates, field_norm, height, make_basis

basis = make_basis(2)
print("basis sqrt(f) for f in", basis.products)

# The worked square: every basis product folds back into the basis.
w = QuadInt(basis, [1, 1, 1, 1])
sq = w * w
print(f"({w})^2 = {sq}")

# Height grows at most by the factor prod(p + 1) = 12 here, and this
# element attains it.
print("height", height(w), "->", height(sq), "bound", height(w) ** 2 * 12)

# A nonzero algebraic integer has |norm| >= 1, so all of its conjugates
# cannot be small at once.  That is what keeps ||w|| away from 0.
x = QuadInt.from_dict(basis, {2: 5, 3: 4})  # ||x|| ~ 7.3e-4
print("x =", x)
for c in conjugates(x):
    print("   conjugate", c)
print("norm(x) =", field_norm(x))
