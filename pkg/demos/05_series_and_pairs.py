"""Exact asymptotic series and the pair construction behind tiny fractional parts.

Run: python demos/05_series_and_pairs.py
"""

from __future__ import annotations

from fractions import Fraction

from rootsum.pairs import base_expressions, build_pair
from rootsum.series import K_coeffs, SqrtTerm, sqrt_term_series

# sqrt((n + 1)^2 - 1) expanded exactly at large n.
print(sqrt_term_series(SqrtTerm(1, 1, -1), 4))

# A base pair 2v sqrt(n^2 +- 1/v) starts like +-1/n; the error terms
# shrink with v.
wp, wm = base_expressions(16)
print("v=16 plus :", wp.series(3))
print("v=16 minus:", wm.series(3))

for h in (1, 2, 3):
    cert = build_pair(h, 1, Fraction(1, 4))
    print(f"\nlevel {h}: v={cert.v}, outer coefficients {[str(a) for a in cert.omega_plus.a]}")
    print("  plus :", cert.series_plus)
    print("  K(h, 0..1) =", [str(k) for k in K_coeffs(h, 1)], " margin", cert.checks.margin)
