"""Effort cost families.

Two families are provided, both with ``c(0) = 0``, strictly increasing, convex
and with a non-negative third derivative everywhere on ``[0, inf)``:

* ``quadratic``: ``c(mu) = kappa * mu**2 / 2``
* ``power``:     ``c(mu) = kappa * mu**p / p`` with ``p == 2`` or ``p >= 3``

Exponents in ``(2, 3)`` are rejected because ``c'''`` blows up at zero effort.
All derivatives are analytic. Every method accepts floats or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

FAMILIES = ("quadratic", "power")


def _check_nonneg(x, name: str) -> None:
    if np.any(np.asarray(x) < 0) or np.any(np.isnan(np.asarray(x, dtype=float))):
        raise DomainError(f"{name} must be non-negative, got {x!r}")


@dataclass(frozen=True)
class CostModel:
    """Effort cost ``c(mu) = kappa * mu**p / p``.

    Use :meth:`quadratic` or :meth:`power` rather than the raw constructor.
    """

    family: str
    kappa: float
    p: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown cost family {self.family!r}; expected one of {FAMILIES}")
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise DomainError(f"kappa must be positive and finite, got {self.kappa!r}")
        if self.family == "quadratic" and self.p != 2:
            raise DomainError(f"quadratic family has p = 2, got p = {self.p!r}")
        if self.family == "power":
            if not np.isfinite(self.p) or not (self.p == 2 or self.p >= 3):
                raise DomainError(f"power exponent must be 2 or >= 3, got p = {self.p!r}")

    @classmethod
    def quadratic(cls, kappa: float = 1.0) -> "CostModel":
        return cls("quadratic", float(kappa), 2.0)

    @classmethod
    def power(cls, kappa: float, p: float) -> "CostModel":
        return cls("power", float(kappa), float(p))

    def cost(self, mu):
        _check_nonneg(mu, "effort")
        return self.kappa * mu**self.p / self.p

    def marginal_cost(self, mu):
        _check_nonneg(mu, "effort")
        return self.kappa * mu ** (self.p - 1.0)

    def marginal_cost_inverse(self, y):
        """Effort at which the marginal cost equals ``y``."""
        _check_nonneg(y, "marginal cost")
        return (y / self.kappa) ** (1.0 / (self.p - 1.0))

    def second_derivative(self, mu):
        _check_nonneg(mu, "effort")
        if self.p == 2:
            return self.kappa + 0.0 * mu
        return self.kappa * (self.p - 1.0) * mu ** (self.p - 2.0)

    def third_derivative(self, mu):
        _check_nonneg(mu, "effort")
        if self.p == 2:
            return 0.0 * mu
        return self.kappa * (self.p - 1.0) * (self.p - 2.0) * mu ** (self.p - 3.0)

    def effort_surplus(self, mu):
        """``c'(mu) * mu - c(mu)``, computed without cancellation.

        The information rent is a difference of two such terms.
        """
        _check_nonneg(mu, "effort")
        return self.kappa * (self.p - 1.0) / self.p * mu**self.p

    def describe(self) -> str:
        if self.family == "quadratic":
            return f"quadratic(kappa={self.kappa:g})"
        return f"power(kappa={self.kappa:g}, p={self.p:g})"
