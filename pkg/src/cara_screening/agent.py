"""The agent's side of the model.

A type-k agent (``k`` in ``{"H", "L"}``) controls the drift of output
``dZ = mu * theta_k dt + sigma dW`` at flow cost ``c(mu)`` and has CARA utility
``U(x) = 1 - exp(-rho x)``. Contracts pay ``gamma + beta * Z_1`` at time one.

Under an affine contract the agent's problem separates period by period, so the
best response is the constant effort solving ``c'(mu) = beta * theta_k`` and the
certainty equivalent is available in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostModel
from .errors import BracketError, DomainError

TYPES = ("H", "L")

# relative slack allowed when a computed effort lands on mu_max through round-off
_BOUND_RTOL = 1e-12


def _check_type(k: str) -> None:
    if k not in TYPES:
        raise DomainError(f"agent type must be 'H' or 'L', got {k!r}")


@dataclass(frozen=True)
class ModelParams:
    """Economy parameters.

    ``theta_H == theta_L`` is accepted as a degenerate limit for library use;
    configuration files require the strict inequality.
    """

    theta_L: float
    theta_H: float
    rho: float
    sigma: float
    alpha: float
    w_L: float = 0.0
    w_H: float = 0.0
    mu_max: float = 10.0

    def __post_init__(self):
        for name in ("theta_L", "theta_H", "rho", "sigma", "alpha", "w_L", "w_H", "mu_max"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.theta_L <= 0:
            raise DomainError("theta_L must be positive")
        if self.theta_H < self.theta_L:
            raise DomainError("theta_H must be at least theta_L")
        if self.rho <= 0:
            raise DomainError("rho must be positive")
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if self.mu_max <= 0:
            raise DomainError("mu_max must be positive")

    def theta(self, k: str) -> float:
        _check_type(k)
        return self.theta_H if k == "H" else self.theta_L

    def reservation(self, k: str) -> float:
        _check_type(k)
        return self.w_H if k == "H" else self.w_L


@dataclass(frozen=True)
class LinearContract:
    """Terminal payment ``intercept + slope * Z_1``."""

    slope: float
    intercept: float
    designed_for: str

    def __post_init__(self):
        _check_type(self.designed_for)

    def payoff(self, z1):
        return self.intercept + self.slope * z1


@dataclass(frozen=True)
class CertaintyEquivalent:
    value: float
    agent_type: str
    contract_type: str
    effort: float


def _bounded_effort(mu: float, params: ModelParams, what: str) -> float:
    if mu > params.mu_max * (1.0 + _BOUND_RTOL):
        raise BracketError(f"{what} {mu:.6g} exceeds the effort bound mu_max = {params.mu_max:g}")
    return min(mu, params.mu_max)


def risk_premium(params: ModelParams, slope: float) -> float:
    return 0.5 * params.rho * slope**2 * params.sigma**2


def best_response_effort(
    model: CostModel, params: ModelParams, contract: LinearContract, k: str
) -> float:
    """Constant effort maximising ``slope * theta_k * mu - c(mu)``."""
    if contract.slope < 0:
        raise DomainError(f"contract slope must be non-negative, got {contract.slope!r}")
    y = contract.slope * params.theta(k)
    return _bounded_effort(float(model.marginal_cost_inverse(y)), params, "best-response effort")


def imitation_effort(model: CostModel, params: ModelParams, mu_m: float, k: str, m: str) -> float:
    """Effort of a type-k agent on the contract that implements ``mu_m`` for type m.

    Solves ``c'(mu) = theta_k / theta_m * c'(mu_m)``.
    """
    _check_type(k)
    _check_type(m)
    if mu_m < 0:
        raise DomainError(f"effort must be non-negative, got {mu_m!r}")
    if k == m:
        return mu_m
    ratio = params.theta(k) / params.theta(m)
    mu = float(model.marginal_cost_inverse(ratio * model.marginal_cost(mu_m)))
    return _bounded_effort(mu, params, "imitation effort")


def rent_integrand(model: CostModel, params: ModelParams, mu_L: float) -> float:
    """Information rent above ``w_L`` that the H-type earns on the L-contract."""
    mu_HL = imitation_effort(model, params, mu_L, "H", "L")
    return float(model.effort_surplus(mu_HL) - model.effort_surplus(mu_L))


def rent_derivative(model: CostModel, params: ModelParams, mu_L: float) -> float:
    """d(rent)/d(mu_L), using ``c''(mu_HL) dmu_HL/dmu_L = theta_H/theta_L c''(mu_L)``."""
    mu_HL = imitation_effort(model, params, mu_L, "H", "L")
    ratio = params.theta_H / params.theta_L
    return float(ratio * model.second_derivative(mu_L) * (mu_HL - mu_L / ratio))


def build_contract(
    model: CostModel, params: ModelParams, mu: float, w: float, k: str
) -> LinearContract:
    """Affine contract implementing constant effort ``mu`` with certainty equivalent ``w`` for type k."""
    _check_type(k)
    if not 0 <= mu <= params.mu_max:
        raise DomainError(f"effort must lie in [0, {params.mu_max:g}], got {mu!r}")
    slope = float(model.marginal_cost(mu)) / params.theta(k)
    intercept = (
        w
        + float(model.cost(mu))
        - float(model.marginal_cost(mu)) * mu
        + risk_premium(params, slope)
    )
    return LinearContract(slope=slope, intercept=intercept, designed_for=k)


def certainty_equivalent_at(
    model: CostModel, params: ModelParams, contract: LinearContract, k: str, mu: float
) -> float:
    """CE of type k exerting constant effort ``mu`` (not necessarily optimal) under ``contract``."""
    return (
        contract.intercept
        + contract.slope * params.theta(k) * mu
        - float(model.cost(mu))
        - risk_premium(params, contract.slope)
    )


def certainty_equivalent(
    model: CostModel, params: ModelParams, contract: LinearContract, k: str
) -> CertaintyEquivalent:
    mu = best_response_effort(model, params, contract, k)
    value = certainty_equivalent_at(model, params, contract, k, mu)
    return CertaintyEquivalent(value=value, agent_type=k, contract_type=contract.designed_for, effort=mu)
