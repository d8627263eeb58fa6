from __future__ import annotations

import mpmath
import pytest
from hypothesis import strategies as st

from rootsum.ring import QuadInt, QuadRat, make_basis

mpmath.mp.prec = 256


def mp_value(w) -> mpmath.mpf:
    """Independent high-precision value of a multiquadratic element."""
    total = mpmath.mpf(0)
    for f, c in zip(w.basis.products, w.coeffs):
        if c:
            total += mpmath.mpf(c.numerator if hasattr(c, "numerator") else c) / (
                c.denominator if hasattr(c, "denominator") else 1
            ) * mpmath.sqrt(f)
    return total


def mp_dist(x) -> mpmath.mpf:
    return abs(x - mpmath.nint(x))


@st.composite
def quad_ints(draw, tau=None, lo=-10, hi=10, nonzero=False, no_unit=False):
    t = tau if tau is not None else draw(st.integers(1, 3))
    basis = make_basis(t)
    coeffs = draw(st.lists(st.integers(lo, hi), min_size=basis.size, max_size=basis.size))
    if no_unit:
        coeffs[0] = 0
    if nonzero and not any(coeffs):
        coeffs[-1] = 1
    return QuadInt(basis, coeffs)


@st.composite
def quad_rats(draw, tau=None):
    t = tau if tau is not None else draw(st.integers(1, 3))
    basis = make_basis(t)
    coeffs = draw(
        st.lists(
            st.fractions(min_value=-20, max_value=20, max_denominator=12),
            min_size=basis.size,
            max_size=basis.size,
        )
    )
    return QuadRat(basis, coeffs)


@pytest.fixture
def b1():
    return make_basis(1)


@pytest.fixture
def b2():
    return make_basis(2)


@pytest.fixture
def b3():
    return make_basis(3)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Append a PASS/FAIL line; lines are echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
