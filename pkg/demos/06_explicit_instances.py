"""Explicit sums of k square roots with fractional part of order n^-k.

Run: python demos/06_explicit_instances.py
"""

from __future__ import annotations

from fractions import Fraction

from rootsum.pairs import (
    Theorem1Instance,
    build_pair,
    theorem1_instance,
    theorem1_verify,
)

inst = Theorem1Instance(1, (2,), (4,), Fraction(1), 1, 1)  # sqrt(4 n^2 + 4)
for k in (1, 2, 3):
    if k > 1:
        inst = theorem1_instance(k, build_pair(k, 1, Fraction(1, 4)))
    terms = " + ".join(f"sqrt({a}^2 (n+{i})^2 {b:+d})" for i, (a, b) in enumerate(zip(inst.a, inst.b)))
    n0 = 50 * max(inst.a)
    res = theorem1_verify(inst, [n0 * 2**e for e in range(5)])
    print(f"k={k}: {terms}")
    for row in res.rows:
        print(f"   n={row.n:7d}  ||.|| in [{float(row.err.lo):.6e}, {float(row.err.hi):.6e}]  n^k*err {float(row.scaled):.6f}")
    print(f"   slope {res.slope:.4f}, limit G0 = {inst.G0}")
