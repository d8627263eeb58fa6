"""Sums of square roots of integers with tiny or prescribed fractional parts.

Exact arithmetic in multiquadratic fields, certified interval evaluation,
pigeonhole and greedy searches, and exact truncated series.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .ring import QuadInt, QuadRat, make_basis

__all__ = ["QuadInt", "QuadRat", "make_basis", "__version__"]
