"""Optimal screening menu in the regime where the H-type wants to imitate.

The L-type's participation constraint and the H-type's incentive constraint
bind. The H-contract implements the second-best effort; the L-contract's effort
is distorted downward so that the rent left to the H-type shrinks. Two cases:

* ``PchSlack``: the H-type's outside option is not binding and the L-effort
  solves the first-order condition of expected profit, where the H-type's
  certainty equivalent is ``w_L + rent(mu_L)``.
* ``PchBinding``: the H-type's outside option binds and the L-effort solves
  ``rent(mu_L) = w_H - w_L``.

If hiring the L-type lowers expected profit the menu degenerates to a single
second-best H-contract (``LTypeExcluded``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from scipy.optimize import brentq

from . import agent
from .agent import LinearContract, ModelParams
from .cost import CostModel
from .errors import BracketError, DomainError, RegimeUnsupported

XTOL = 1e-13
RESIDUAL_TOL = 1e-9
BINDING_TOL = 1e-8


class Regime(str, enum.Enum):
    PCH_SLACK = "PchSlack"
    PCH_BINDING = "PchBinding"
    L_TYPE_EXCLUDED = "LTypeExcluded"


@dataclass(frozen=True)
class ContractMenu:
    contract_H: LinearContract
    contract_L: Optional[LinearContract]
    mu_H_star: float
    mu_L_star: float
    mu_HL_star: float
    ce_H_offered: float
    ce_L_offered: float
    regime: Regime
    icc_H_slack: Optional[float]
    icc_L_slack: float
    pc_H_slack: float
    pc_L_slack: Optional[float]


@dataclass(frozen=True)
class SolveReport:
    menu: ContractMenu
    principal_profit: float
    rent: float
    second_best_efforts: tuple[float, float]
    residuals: dict[str, float]
    notes: list[str] = field(default_factory=list)


def _find_root(f: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(
            f"{what}: no sign change on [{lo:.6g}, {hi:.6g}] (f = {f_lo:.3g}, {f_hi:.3g})"
        )
    return brentq(f, lo, hi, xtol=XTOL, rtol=4 * 2.220446049250313e-16, maxiter=500)


def _imitation_ceiling(model: CostModel, params: ModelParams) -> float:
    # largest mu_L whose H-imitation effort stays within mu_max
    y = params.theta_L / params.theta_H * model.marginal_cost(params.mu_max)
    return min(params.mu_max, float(model.marginal_cost_inverse(y)))


def surplus(model: CostModel, params: ModelParams, mu: float, k: str) -> float:
    """Expected output minus the cost of implementing ``mu`` at certainty equivalent zero."""
    theta = params.theta(k)
    slope = float(model.marginal_cost(mu)) / theta
    return mu * theta - float(model.cost(mu)) - agent.risk_premium(params, slope)


def second_best_residual(model: CostModel, params: ModelParams, mu: float, k: str) -> float:
    theta = params.theta(k)
    scale = params.rho * params.sigma**2 / theta**2
    return float(model.marginal_cost(mu) * (1.0 + scale * model.second_derivative(mu))) - theta


def second_best_effort(model: CostModel, params: ModelParams, k: str) -> float:
    """Profit-maximising effort for type k with moral hazard only."""
    return _find_root(
        lambda mu: second_best_residual(model, params, mu, k),
        0.0,
        params.mu_max,
        f"second-best effort of type {k}",
    )


def pch_slack_residual(model: CostModel, params: ModelParams, mu: float) -> float:
    weight = params.alpha / (1.0 - params.alpha)
    return second_best_residual(model, params, mu, "L") + weight * agent.rent_derivative(
        model, params, mu
    )


def effort_L_pch_slack(model: CostModel, params: ModelParams) -> float:
    """Distorted L-effort when the H-type's participation constraint is slack."""
    return _find_root(
        lambda mu: pch_slack_residual(model, params, mu),
        0.0,
        _imitation_ceiling(model, params),
        "L-effort with slack H participation",
    )


def effort_L_pch_binding(model: CostModel, params: ModelParams) -> float:
    """L-effort at which the H-type's rent exactly equals ``w_H - w_L``."""
    gap = params.w_H - params.w_L
    if gap < 0:
        raise DomainError("binding H participation needs w_H >= w_L")
    if gap == 0:
        return 0.0
    return _find_root(
        lambda mu: agent.rent_integrand(model, params, mu) - gap,
        0.0,
        _imitation_ceiling(model, params),
        "L-effort with binding H participation",
    )


def principal_profit(
    model: CostModel, params: ModelParams, mu_H: float, mu_L: float, ce_H: float
) -> float:
    """Expected profit of a two-contract menu with the L-type held at ``w_L``."""
    a = params.alpha
    return a * (surplus(model, params, mu_H, "H") - ce_H) + (1.0 - a) * (
        surplus(model, params, mu_L, "L") - params.w_L
    )


def profit_for_L_effort(
    model: CostModel, params: ModelParams, mu_L: float, mu_H: Optional[float] = None
) -> float:
    """Profit of the cheapest menu implementing ``mu_L``.

    The H-type receives the larger of its outside option and its imitation
    payoff; the L-type is held at ``w_L``.
    """
    if mu_H is None:
        mu_H = second_best_effort(model, params, "H")
    ce_H = max(params.w_H, params.w_L + agent.rent_integrand(model, params, mu_L))
    return principal_profit(model, params, mu_H, mu_L, ce_H)


def _ce(model, params, contract, k) -> float:
    return agent.certainty_equivalent(model, params, contract, k).value


def solve(
    model: CostModel,
    params: ModelParams,
    binding_tol: float = BINDING_TOL,
    residual_tol: float = RESIDUAL_TOL,
) -> SolveReport:
    notes: list[str] = []
    mu_H = second_best_effort(model, params, "H")
    mu_L_sb = second_best_effort(model, params, "L")
    residuals = {"second_best_H": second_best_residual(model, params, mu_H, "H")}

    candidate = effort_L_pch_slack(model, params)
    gap = params.w_H - params.w_L
    if agent.rent_integrand(model, params, candidate) >= gap:
        regime = Regime.PCH_SLACK
        mu_L = candidate
        rent = agent.rent_integrand(model, params, mu_L)
        ce_H = params.w_L + rent
        residuals["pch_slack_foc"] = pch_slack_residual(model, params, mu_L)
    else:
        mu_threshold = min(mu_L_sb, _imitation_ceiling(model, params))
        if gap > agent.rent_integrand(model, params, mu_threshold) * (1.0 + 1e-12) + binding_tol:
            raise RegimeUnsupported(
                "the H-type has no imitation incentive: w_H - w_L exceeds its rent on the "
                "second-best L-contract, so the second-best menu is optimal and the H-type "
                "incentive constraint is slack",
                kind="no_h_imitation",
            )
        regime = Regime.PCH_BINDING
        mu_L = effort_L_pch_binding(model, params)
        rent = agent.rent_integrand(model, params, mu_L)
        ce_H = params.w_H
        residuals["pch_binding"] = rent - gap

    contract_L = agent.build_contract(model, params, mu_L, params.w_L, "L")
    contract_H = agent.build_contract(model, params, mu_H, ce_H, "H")
    ce = {
        (k, m.designed_for): _ce(model, params, m, k)
        for k in agent.TYPES
        for m in (contract_H, contract_L)
    }
    icc_L = ce["L", "L"] - ce["L", "H"]
    if icc_L < -binding_tol:
        raise RegimeUnsupported(
            f"the L-type prefers the H-contract (ICC slack {icc_L:.3g}); "
            "the L-imitation regime is not solved",
            kind="l_imitation",
        )

    profit = principal_profit(model, params, mu_H, mu_L, ce_H)
    menu = ContractMenu(
        contract_H=contract_H,
        contract_L=contract_L,
        mu_H_star=mu_H,
        mu_L_star=mu_L,
        mu_HL_star=agent.imitation_effort(model, params, mu_L, "H", "L"),
        ce_H_offered=ce_H,
        ce_L_offered=params.w_L,
        regime=regime,
        icc_H_slack=ce["H", "H"] - ce["H", "L"],
        icc_L_slack=icc_L,
        pc_H_slack=ce["H", "H"] - params.w_H,
        pc_L_slack=ce["L", "L"] - params.w_L,
    )

    # dropping the L-type removes the rent; only feasible if the L-type then
    # prefers its outside option to the H-contract
    excluded_profit = params.alpha * (surplus(model, params, mu_H, "H") - params.w_H)
    if excluded_profit > profit + binding_tol:
        contract_H_only = agent.build_contract(model, params, mu_H, params.w_H, "H")
        ce_LH = _ce(model, params, contract_H_only, "L")
        if ce_LH <= params.w_L:
            notes.append(
                f"L-type excluded: serving it yields profit {profit:.6g} "
                f"< {excluded_profit:.6g} from the H-contract alone"
            )
            menu = ContractMenu(
                contract_H=contract_H_only,
                contract_L=None,
                mu_H_star=mu_H,
                mu_L_star=0.0,
                mu_HL_star=0.0,
                ce_H_offered=params.w_H,
                ce_L_offered=params.w_L,
                regime=Regime.L_TYPE_EXCLUDED,
                icc_H_slack=None,
                icc_L_slack=params.w_L - ce_LH,
                pc_H_slack=_ce(model, params, contract_H_only, "H") - params.w_H,
                pc_L_slack=None,
            )
            profit, rent = excluded_profit, 0.0
        else:
            notes.append("excluding the L-type would raise profit but it would take the H-contract")

    bad = {name: r for name, r in residuals.items() if not abs(r) <= residual_tol}
    if bad:
        raise BracketError(f"first-order residuals above {residual_tol:g}: {bad}")

    return SolveReport(
        menu=menu,
        principal_profit=profit,
        rent=rent,
        second_best_efforts=(mu_H, mu_L_sb),
        residuals=residuals,
        notes=notes,
    )
