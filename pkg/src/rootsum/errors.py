"""Exception hierarchy shared by all rootsum modules.

The CLI maps these onto process exit codes, so each class carries its code.
"""

from __future__ import annotations


class RootsumError(Exception):
    exit_code = 1


class UsageError(RootsumError, ValueError):
    """Bad arguments: mixed bases, wrong vector lengths, out-of-range parameters."""

    exit_code = 64


class CapacityError(RootsumError):
    """An exhaustive enumeration would exceed the configured point cap."""

    exit_code = 2

    def __init__(self, required: int, cap: int, what: str = "points"):
        self.required = required
        self.cap = cap
        super().__init__(f"enumeration needs {required} {what}, cap is {cap}")


class BudgetExceededError(RootsumError):
    """Precision escalation ran past the bit budget without deciding a floor or sign."""

    exit_code = 3

    def __init__(self, message: str, best=None):
        self.best = best
        super().__init__(message)


class NotFoundError(RootsumError):
    exit_code = 1


class DegenerateError(RootsumError):
    exit_code = 1
