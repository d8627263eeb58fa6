"""Hit a prescribed fractional part with k square roots, certified.

Run: python demos/07_prescribed_fraction.py
"""

from __future__ import annotations

from rootsum.driver import exponent_scan, solve_theorem2
from rootsum.evaluation import to_decimal

a = solve_theorem2(3, "pi", 10_000)
print(f"k=3, alpha={{pi}}, n=10^4: b = {a.b}")
print(f"  err in {a.err}, method {a.method}, D_emp = {to_decimal(a.D_emp, 6)}")
print(f"  pure greedy stage: coefficients {a.greedy.d}, err <= {to_decimal(a.greedy.err.hi, 4)}")

for k, ns in ((1, [64, 256, 1024, 4096]), (3, [100, 1000, 10000])):
    scan = exponent_scan("t2", k, ns, "1/2")
    print(f"\nk={k}, alpha=1/2: fitted slope {scan.slope:.3f}")
    print(scan.to_csv(), end="")
