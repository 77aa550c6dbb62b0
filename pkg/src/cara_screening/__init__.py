"""Optimal menus of linear contracts for a CARA agent with hidden productivity.

The principal faces moral hazard (effort is unobserved), two agent types
with private productivity, and type-dependent outside options. Optimal
contracts are affine in terminal output; this package computes them and checks
them against Monte Carlo and dynamic-programming oracles.
"""

from .agent import (
    CertaintyEquivalent,
    LinearContract,
    ModelParams,
    best_response_effort,
    build_contract,
    certainty_equivalent,
    imitation_effort,
    rent_integrand,
)
from .cost import CostModel
from .errors import BracketError, ConfigError, ContractError, DomainError, NumericError, RegimeUnsupported
from .principal import (
    ContractMenu,
    Regime,
    SolveReport,
    effort_L_pch_binding,
    effort_L_pch_slack,
    second_best_effort,
    solve,
)
from .verify import AuditReport, audit_menu, dp_best_response, simulate_ce

__version__ = "0.1.0"
