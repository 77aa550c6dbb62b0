"""One-parameter sweeps of the solver."""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional

import numpy as np

from .config import RunConfig, SweepSettings
from .errors import BracketError, DomainError, RegimeUnsupported
from .principal import solve

WORKERS_ENV = "CARA_SCREENING_WORKERS"


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep_grid(sweep: SweepSettings) -> np.ndarray:
    return np.linspace(sweep.start, sweep.stop, sweep.steps)


def solve_point(config: RunConfig, parameter: str, value: float, index: int = 0) -> dict[str, Any]:
    row: dict[str, Any] = {"index": index, "parameter": parameter, "value": float(value)}
    try:
        params = dataclasses.replace(config.params, **{parameter: float(value)})
        if params.theta_H <= params.theta_L:
            raise DomainError("theta_H must exceed theta_L")
        rep = solve(config.cost, params, config.solver.binding_tol, config.solver.residual_tol)
    except RegimeUnsupported as exc:
        row.update(status="RegimeUnsupported", regime=exc.kind, detail=str(exc))
        return row
    except BracketError as exc:
        row.update(status="BracketError", detail=str(exc))
        return row
    except DomainError as exc:
        row.update(status="InvalidParameters", detail=str(exc))
        return row
    m = rep.menu
    row.update(
        status="ok",
        regime=m.regime.value,
        mu_L=m.mu_L_star,
        mu_H=m.mu_H_star,
        rent=rep.rent,
        profit=rep.principal_profit,
        icc_H_slack=m.icc_H_slack,
        icc_L_slack=m.icc_L_slack,
        pc_H_slack=m.pc_H_slack,
        pc_L_slack=m.pc_L_slack,
        detail="; ".join(rep.notes),
    )
    return row


def run_sweep(config: RunConfig, sweep: Optional[SweepSettings] = None, workers: Optional[int] = None) -> list[dict]:
    """Solve at every grid point; rows come back in grid order whatever the worker count."""
    sweep = sweep or config.sweep
    if sweep is None:
        raise DomainError("configuration has no sweep section")
    grid = sweep_grid(sweep)
    workers = workers or default_workers()
    jobs = [(config, sweep.parameter, v, i) for i, v in enumerate(grid)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: solve_point(*job), jobs))
    return [solve_point(*job) for job in jobs]
