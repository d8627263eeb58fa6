"""The pigeonhole law: height n buys ||w|| <= n^-(2^tau - 1).

Compares the Dirichlet witness with the exhaustive minimum.

Run: python demos/03_pigeonhole.py
"""

from __future__ import annotations

from rootsum.evaluation import to_decimal
from rootsum.pigeonhole import brute_min_dist, dirichlet_search
from rootsum.ring import make_basis

for tau, ns in ((1, (10, 50, 200)), (2, (5, 10, 20))):
    basis = make_basis(tau)
    dim = basis.size - 1
    print(f"tau={tau}: bound n^-{dim}")
    for n in ns:
        wit = dirichlet_search(basis, n)
        best, d = brute_min_dist(basis, n)
        print(
            f"  n={n:4d}  dirichlet {wit.w!s:28s} ||.|| {to_decimal(wit.dist.hi, 4)}"
            f"   optimum {best!s:28s} {to_decimal(d.hi, 4)}"
            f"   n^{dim}*opt {to_decimal(d.hi * n**dim, 4)}"
        )
