"""Independent checks of solver output.

Three routes to each agent's certainty equivalent on each contract:

* the closed form in :mod:`cara_screening.agent`;
* Monte Carlo simulation of the output SDE with an Euler scheme;
* backward induction over a discrete-time, discrete-effort version of the
  agent's control problem, with no assumption that the optimal effort is
  constant.

:func:`audit_menu` combines them with the participation and incentive checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from . import agent
from .agent import LinearContract, ModelParams
from .cost import CostModel
from .errors import BracketError, DomainError, NumericError
from .principal import BINDING_TOL, ContractMenu

# paths per RNG substream; fixed so results do not depend on worker count
CHUNK_PATHS = 1 << 16


@dataclass(frozen=True)
class SimPath:
    times: np.ndarray
    dW: np.ndarray
    Z: np.ndarray
    seed: int


@dataclass(frozen=True)
class MonteCarloSettings:
    n_paths: int = 100_000
    n_steps: int = 50
    seed: int = 12345
    workers: int = 1


@dataclass(frozen=True)
class DPSettings:
    n_steps: int = 50
    effort_step: float = 1e-3
    state_points: int = 11
    quadrature_nodes: int = 12


@dataclass(frozen=True)
class EffortPolicy:
    """Effort chosen at each (time step, state node) of the DP grid."""

    states: np.ndarray
    efforts: np.ndarray
    grid_step: float

    def at(self, step: int, state: float) -> float:
        j = int(np.argmin(np.abs(self.states - state)))
        return float(self.efforts[step, j])

    @property
    def spread(self) -> float:
        return float(self.efforts.max() - self.efforts.min())


def simulate_paths(
    params: ModelParams, k: str, mu: float, n_paths: int, n_steps: int, seed: int
) -> SimPath:
    """Euler paths of ``dZ = mu theta_k dt + sigma dW`` on [0, 1] from ``Z_0 = 0``."""
    if n_paths < 1 or n_steps < 1:
        raise DomainError("n_paths and n_steps must be at least 1")
    dt = 1.0 / n_steps
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    dW = rng.standard_normal((n_paths, n_steps)) * math.sqrt(dt)
    dZ = mu * params.theta(k) * dt + params.sigma * dW
    Z = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(dZ, axis=1)], axis=1)
    return SimPath(times=np.linspace(0.0, 1.0, n_steps + 1), dW=dW, Z=Z, seed=seed)


def _terminal_disutility(
    child: np.random.SeedSequence, n: int, n_steps: int, drift: float, sigma: float,
    contract: LinearContract, effort_cost: float, rho: float,
) -> np.ndarray:
    rng = np.random.default_rng(child)
    dt = 1.0 / n_steps
    dW = rng.standard_normal((n, n_steps)) * math.sqrt(dt)
    z1 = (drift * dt + sigma * dW).sum(axis=1)
    wealth = contract.payoff(z1) - effort_cost
    return np.exp(-rho * wealth)


def simulate_ce(
    model: CostModel,
    params: ModelParams,
    contract: LinearContract,
    k: str,
    mu: float,
    n_paths: int,
    n_steps: int,
    seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo certainty equivalent of type k exerting constant ``mu`` under ``contract``.

    The CE is ``-log(mean(exp(-rho X))) / rho`` on the pooled sample; its
    standard error comes from the delta method. Each block of
    ``CHUNK_PATHS`` paths draws from its own spawned seed, so the estimate is
    the same for any ``workers``.
    """
    if n_paths < 1 or n_steps < 1:
        raise DomainError("n_paths and n_steps must be at least 1")
    sizes = [CHUNK_PATHS] * (n_paths // CHUNK_PATHS)
    if n_paths % CHUNK_PATHS:
        sizes.append(n_paths % CHUNK_PATHS)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    args = (n_steps, mu * params.theta(k), params.sigma, contract, float(model.cost(mu)), params.rho)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda cs: _terminal_disutility(cs[0], cs[1], *args), zip(children, sizes)))
    else:
        parts = [_terminal_disutility(c, s, *args) for c, s in zip(children, sizes)]
    disutility = np.concatenate(parts)

    mean = float(disutility.mean())
    if not (mean > 0 and np.isfinite(mean)):
        raise NumericError(f"mean disutility {mean!r} is outside (0, inf); expected utility left the CARA range")
    ce = -math.log(mean) / params.rho
    if n_paths < 2:
        return ce, float("nan")
    sd = float(disutility.std(ddof=1))
    return ce, sd / math.sqrt(n_paths) / (params.rho * mean)


def _uniform_interp(x: np.ndarray, x0: float, h: float, fp: np.ndarray) -> np.ndarray:
    # piecewise-linear on a uniform grid, extended linearly past both ends
    idx = np.clip(np.floor((x - x0) / h).astype(np.intp), 0, fp.size - 2)
    frac = (x - x0) / h - idx
    return fp[idx] + frac * (fp[idx + 1] - fp[idx])


def dp_best_response(
    model: CostModel,
    params: ModelParams,
    contract: LinearContract,
    k: str,
    n_steps: int = 50,
    effort_grid: Optional[int] = None,
    state_points: int = 11,
    quadrature_nodes: int = 12,
) -> tuple[EffortPolicy, float]:
    """Backward induction for the agent's problem under ``contract``.

    The state is accumulated net wealth ``x = gamma + beta Z_t - int c``. At
    each step and state node the agent picks effort from a uniform grid on
    ``[0, mu_max]`` (``effort_grid`` points, spacing 1e-3 by default) to
    minimise ``E[exp(-rho X_1)]``. The one-step expectation uses Gauss-Hermite
    quadrature, and the continuation value is interpolated in
    ``log E[exp(-rho X_1)]``, which is linear in wealth under CARA, so
    off-grid evaluation introduces no error.

    Returns the policy and the certainty equivalent at ``x = gamma``.
    """
    if n_steps < 1 or state_points < 3:
        raise DomainError("need n_steps >= 1 and state_points >= 3")
    if effort_grid is None:
        effort_grid = int(round(params.mu_max / 1e-3)) + 1
    if effort_grid < 2:
        raise DomainError("effort_grid needs at least two points")
    if state_points % 2 == 0:
        state_points += 1

    rho, dt = params.rho, 1.0 / n_steps
    efforts = np.linspace(0.0, params.mu_max, effort_grid)
    flow = (contract.slope * params.theta(k) * efforts - model.cost(efforts)) * dt
    shock_scale = contract.slope * params.sigma * math.sqrt(dt)
    nodes, weights = hermegauss(quadrature_nodes)
    log_w = np.log(weights / weights.sum())

    half_width = max(1.0, 6.0 * abs(contract.slope) * params.sigma)
    states = contract.intercept + np.linspace(-half_width, half_width, state_points)
    h = states[1] - states[0]
    log_d = -rho * states  # terminal: log exp(-rho x)
    policy = np.empty((n_steps, state_points))

    for n in reversed(range(n_steps)):
        # next-state array, shape (state, effort, node)
        nxt = (
            states[:, None, None]
            + flow[None, :, None]
            + shock_scale * nodes[None, None, :]
        )
        cont = _uniform_interp(nxt, states[0], h, log_d) + log_w
        top = cont.max(axis=2)
        q = top + np.log(np.exp(cont - top[..., None]).sum(axis=2))
        best = np.argmin(q, axis=1)
        policy[n] = efforts[best]
        log_d = q[np.arange(state_points), best]

    value_ce = -float(log_d[state_points // 2]) / rho
    return EffortPolicy(states=states, efforts=policy, grid_step=float(efforts[1] - efforts[0])), value_ce


@dataclass(frozen=True)
class AuditCheck:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class PairEstimate:
    agent_type: str
    contract_type: str
    effort: float
    closed_form: float
    mc: float
    mc_se: float
    dp: float
    dp_effort: float
    dp_policy_spread: float


@dataclass
class AuditReport:
    pairs: list[PairEstimate] = field(default_factory=list)
    slacks: dict[str, Optional[float]] = field(default_factory=dict)
    checks: list[AuditCheck] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AuditCheck]:
        return [c for c in self.checks if not c.passed]


def _upper(name: str, value: float, tol: float, detail: str = "") -> AuditCheck:
    return AuditCheck(name, value, tol, bool(abs(value) <= tol), detail)


def _lower(name: str, value: float, tol: float, detail: str = "") -> AuditCheck:
    return AuditCheck(name, value, tol, bool(value >= -tol), detail)


def audit_menu(
    model: CostModel,
    params: ModelParams,
    menu: ContractMenu,
    mc: MonteCarloSettings = MonteCarloSettings(),
    dp: DPSettings = DPSettings(),
    binding_tol: float = BINDING_TOL,
    mc_sigmas: float = 3.0,
    dp_value_tol: float = 2e-3,
) -> AuditReport:
    """Recompute every certainty equivalent three ways and check the menu's constraints.

    Slacks are recomputed from the contracts; the values stored on ``menu``
    are not trusted. Problems become failed checks, never exceptions.
    """
    report = AuditReport()
    contracts = {"H": menu.contract_H}
    if menu.contract_L is not None:
        contracts["L"] = menu.contract_L
    effort_grid = int(round(params.mu_max / dp.effort_step)) + 1

    cf: dict[tuple[str, str], float] = {}
    for m, contract in contracts.items():
        for k in agent.TYPES:
            tag = f"[{k},{m}]"
            try:
                ce = agent.certainty_equivalent(model, params, contract, k)
            except (BracketError, DomainError) as exc:
                report.checks.append(AuditCheck(f"best_response{tag}", float("nan"), 0.0, False, str(exc)))
                continue
            cf[k, m] = ce.value
            mc_ce, mc_se = simulate_ce(
                model, params, contract, k, ce.effort, mc.n_paths, mc.n_steps, mc.seed, mc.workers
            )
            policy, dp_ce = dp_best_response(
                model, params, contract, k, dp.n_steps, effort_grid, dp.state_points, dp.quadrature_nodes
            )
            dp_effort = policy.at(0, contract.intercept)
            report.pairs.append(
                PairEstimate(k, m, ce.effort, ce.value, mc_ce, mc_se, dp_ce, dp_effort, policy.spread)
            )
            cell = policy.grid_step * (1.0 + 1e-9)
            mc_tol = mc_sigmas * mc_se if mc_se > 0 else 1e-12
            report.checks += [
                _upper(f"mc_agreement{tag}", mc_ce - ce.value, mc_tol, f"{mc_sigmas:g} standard errors"),
                _upper(f"dp_value{tag}", dp_ce - ce.value, dp_value_tol),
                _upper(f"dp_effort{tag}", dp_effort - ce.effort, cell, "one effort grid cell"),
                _upper(f"dp_policy_constant{tag}", policy.spread, cell, "one effort grid cell"),
            ]

    # constraint slacks from closed-form values
    s = report.slacks
    if ("H", "H") in cf:
        s["pc_H_slack"] = cf["H", "H"] - params.w_H
        report.checks.append(_lower("pc_H", s["pc_H_slack"], binding_tol))
    if "L" in contracts:
        if ("L", "L") in cf:
            s["pc_L_slack"] = cf["L", "L"] - params.w_L
            report.checks.append(_upper("pc_L_binding", s["pc_L_slack"], binding_tol))
        if ("H", "H") in cf and ("H", "L") in cf:
            s["icc_H_slack"] = cf["H", "H"] - cf["H", "L"]
            report.checks.append(_upper("icc_H_binding", s["icc_H_slack"], binding_tol))
        if ("L", "L") in cf and ("L", "H") in cf:
            s["icc_L_slack"] = cf["L", "L"] - cf["L", "H"]
            report.checks.append(_lower("icc_L", s["icc_L_slack"], binding_tol))
    elif ("L", "H") in cf:
        s["icc_L_slack"] = params.w_L - cf["L", "H"]
        report.checks.append(_lower("icc_L_outside_option", s["icc_L_slack"], binding_tol))

    # H gains over L on every contract by the effort-surplus difference
    for m, contract in contracts.items():
        if ("H", m) not in cf or ("L", m) not in cf:
            continue
        own = agent.best_response_effort(model, params, contract, m)
        gaps = {
            k: float(model.effort_surplus(agent.best_response_effort(model, params, contract, k))
                     - model.effort_surplus(own))
            for k in agent.TYPES
        }
        difference = cf["H", m] - cf["L", m]
        report.checks.append(_lower(f"rent_ordering[{m}]", difference, binding_tol))
        report.checks.append(
            _upper(f"rent_identity[{m}]", difference - (gaps["H"] - gaps["L"]), 1e-10)
        )

    if "L" in contracts:
        h, l = menu.contract_H, menu.contract_L
        if math.isclose(h.slope, l.slope, abs_tol=1e-12) and math.isclose(h.intercept, l.intercept, abs_tol=1e-12):
            report.flags.append(
                "pooling: both contracts coincide; the H-type's CE on the shared contract exceeds "
                f"the L-type's by {cf.get(('H', 'L'), float('nan')) - cf.get(('L', 'L'), float('nan')):.6g}"
            )
    return report
