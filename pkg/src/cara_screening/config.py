"""JSON run configuration.

Example::

    {
      "model":  {"theta_L": 1.0, "theta_H": 1.2, "rho": 1.0, "sigma": 1.0,
                 "alpha": 0.5, "w_L": 0.0, "w_H": 0.0},
      "cost":   {"family": "quadratic", "kappa": 1.0},
      "solver": {"mu_max": 5.0, "binding_tol": 1e-8, "residual_tol": 1e-9},
      "verify": {"n_paths": 100000, "n_steps": 50, "effort_grid": 0.001,
                 "seed": 12345, "mc_sigmas": 3.0, "dp_value_tol": 0.002},
      "sweep":  {"parameter": "w_H", "from": 0.0, "to": 0.1, "steps": 21}
    }

``model`` and ``cost`` are required; the other sections fall back to the
defaults above (``sweep`` has no default). ``effort_grid`` is the spacing of
the DP effort grid. Unknown keys are errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .agent import ModelParams
from .cost import CostModel
from .errors import ConfigError, DomainError

SWEEP_PARAMETERS = ("alpha", "w_H", "w_L", "theta_H", "sigma", "rho")


@dataclass(frozen=True)
class SolverSettings:
    mu_max: float = 5.0
    binding_tol: float = 1e-8
    residual_tol: float = 1e-9


@dataclass(frozen=True)
class VerifySettings:
    n_paths: int = 100_000
    n_steps: int = 50
    effort_grid: float = 1e-3
    seed: int = 12345
    mc_sigmas: float = 3.0
    dp_value_tol: float = 2e-3


@dataclass(frozen=True)
class SweepSettings:
    parameter: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    cost: CostModel
    solver: SolverSettings = field(default_factory=SolverSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)
    sweep: Optional[SweepSettings] = None

    def to_dict(self) -> dict[str, Any]:
        p = self.params
        cost = {"family": self.cost.family, "kappa": self.cost.kappa}
        if self.cost.family == "power":
            cost["p"] = self.cost.p
        out: dict[str, Any] = {
            "model": {
                "theta_L": p.theta_L, "theta_H": p.theta_H, "rho": p.rho, "sigma": p.sigma,
                "alpha": p.alpha, "w_L": p.w_L, "w_H": p.w_H,
            },
            "cost": cost,
            "solver": vars(self.solver).copy(),
            "verify": vars(self.verify).copy(),
        }
        if self.sweep is not None:
            s = self.sweep
            out["sweep"] = {"parameter": s.parameter, "from": s.start, "to": s.stop, "steps": s.steps}
        return out


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def section(self, doc: dict, name: str, required: bool) -> Optional[dict]:
        if name not in doc:
            if required:
                self.errors.append(f"{name}: missing section")
            return None
        value = doc[name]
        if not isinstance(value, dict):
            self.errors.append(f"{name}: expected an object")
            return None
        return value

    def unknown(self, obj: dict, allowed: tuple[str, ...], where: str) -> None:
        for key in obj:
            if key not in allowed:
                self.errors.append(f"{where}.{key}: unknown field")

    def number(self, obj: dict, key: str, where: str, default=None, integer: bool = False):
        if key not in obj:
            if default is None:
                self.errors.append(f"{where}.{key}: required")
            return default
        value = obj[key]
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok and integer and not (isinstance(value, int) or float(value).is_integer()):
            ok = False
        if not ok or not math.isfinite(value):
            self.errors.append(f"{where}.{key}: expected a finite {'integer' if integer else 'number'}, got {value!r}")
            return default
        return int(value) if integer else float(value)

    def check(self, cond: bool, message: str) -> None:
        if not cond:
            self.errors.append(message)


_MODEL_KEYS = ("theta_L", "theta_H", "rho", "sigma", "alpha", "w_L", "w_H")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration, reporting every problem at once."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"malformed JSON: {exc}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a JSON object"])

    c = _Collector()
    c.unknown(doc, ("model", "cost", "solver", "verify", "sweep"), "config")

    model = c.section(doc, "model", required=True) or {}
    c.unknown(model, _MODEL_KEYS, "model")
    m = {key: c.number(model, key, "model", default=0.0 if key in ("w_L", "w_H") else None)
         for key in _MODEL_KEYS}
    if m["theta_L"] is not None:
        c.check(m["theta_L"] > 0, "model.theta_L: must be positive")
    if m["theta_L"] is not None and m["theta_H"] is not None:
        c.check(m["theta_H"] > m["theta_L"], "model.theta_H, model.theta_L: theta_H must exceed theta_L")
    if m["alpha"] is not None:
        c.check(0 < m["alpha"] < 1, "model.alpha: must lie strictly between 0 and 1")
    for key in ("rho", "sigma"):
        if m[key] is not None:
            c.check(m[key] > 0, f"model.{key}: must be positive")

    cost_doc = c.section(doc, "cost", required=True) or {}
    c.unknown(cost_doc, ("family", "kappa", "p"), "cost")
    family = cost_doc.get("family")
    c.check(family in ("quadratic", "power"), f"cost.family: expected 'quadratic' or 'power', got {family!r}")
    kappa = c.number(cost_doc, "kappa", "cost")
    if kappa is not None:
        c.check(kappa > 0, "cost.kappa: must be positive")
    p = None
    if family == "power":
        p = c.number(cost_doc, "p", "cost")
        if p is not None:
            c.check(p == 2 or p >= 3, "cost.p: must be 2 or at least 3")
    elif family == "quadratic" and "p" in cost_doc:
        c.check(cost_doc["p"] == 2, "cost.p: quadratic family has p = 2")

    solver_doc = c.section(doc, "solver", required=False) or {}
    c.unknown(solver_doc, ("mu_max", "binding_tol", "residual_tol"), "solver")
    d = SolverSettings()
    solver = SolverSettings(
        mu_max=c.number(solver_doc, "mu_max", "solver", d.mu_max),
        binding_tol=c.number(solver_doc, "binding_tol", "solver", d.binding_tol),
        residual_tol=c.number(solver_doc, "residual_tol", "solver", d.residual_tol),
    )
    for key in ("mu_max", "binding_tol", "residual_tol"):
        c.check(getattr(solver, key) > 0, f"solver.{key}: must be positive")

    verify_doc = c.section(doc, "verify", required=False) or {}
    c.unknown(verify_doc, ("n_paths", "n_steps", "effort_grid", "seed", "mc_sigmas", "dp_value_tol"), "verify")
    v = VerifySettings()
    verify = VerifySettings(
        n_paths=c.number(verify_doc, "n_paths", "verify", v.n_paths, integer=True),
        n_steps=c.number(verify_doc, "n_steps", "verify", v.n_steps, integer=True),
        effort_grid=c.number(verify_doc, "effort_grid", "verify", v.effort_grid),
        seed=c.number(verify_doc, "seed", "verify", v.seed, integer=True),
        mc_sigmas=c.number(verify_doc, "mc_sigmas", "verify", v.mc_sigmas),
        dp_value_tol=c.number(verify_doc, "dp_value_tol", "verify", v.dp_value_tol),
    )
    c.check(verify.n_paths >= 2, "verify.n_paths: must be at least 2")
    c.check(verify.n_steps >= 1, "verify.n_steps: must be at least 1")
    c.check(verify.seed >= 0, "verify.seed: must be non-negative")
    for key in ("effort_grid", "mc_sigmas", "dp_value_tol"):
        c.check(getattr(verify, key) > 0, f"verify.{key}: must be positive")
    if verify.effort_grid > 0:
        c.check(verify.effort_grid < solver.mu_max, "verify.effort_grid: must be smaller than solver.mu_max")

    sweep = None
    sweep_doc = c.section(doc, "sweep", required=False)
    if sweep_doc is not None:
        c.unknown(sweep_doc, ("parameter", "from", "to", "steps"), "sweep")
        name = sweep_doc.get("parameter")
        c.check(name in SWEEP_PARAMETERS, f"sweep.parameter: expected one of {SWEEP_PARAMETERS}, got {name!r}")
        start = c.number(sweep_doc, "from", "sweep")
        stop = c.number(sweep_doc, "to", "sweep")
        steps = c.number(sweep_doc, "steps", "sweep", integer=True)
        if steps is not None:
            c.check(steps >= 1, "sweep.steps: must be at least 1")
        if start is not None and stop is not None:
            c.check(start <= stop, "sweep.from, sweep.to: from must not exceed to")
            if steps == 1:
                c.check(start == stop, "sweep.steps: a single step needs from == to")
        if not c.errors:
            sweep = SweepSettings(name, start, stop, steps)

    if c.errors:
        raise ConfigError(c.errors)
    try:
        cost = CostModel.power(kappa, p) if family == "power" else CostModel.quadratic(kappa)
        params = ModelParams(mu_max=solver.mu_max, **m)
    except DomainError as exc:
        raise ConfigError([str(exc)]) from None
    return RunConfig(params=params, cost=cost, solver=solver, verify=verify, sweep=sweep)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from None
    return parse_config(text)
