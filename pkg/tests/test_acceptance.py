"""Exit criteria, one test per criterion.

Each test prints a PASS/FAIL line; a summary table is printed at the end of the
pytest run.
"""

import dataclasses
import json

import numpy as np
import pytest

from cara_screening import (
    CostModel,
    ModelParams,
    Regime,
    RegimeUnsupported,
    agent,
    best_response_effort,
    build_contract,
    certainty_equivalent,
    effort_L_pch_slack,
    imitation_effort,
    rent_integrand,
    second_best_effort,
    solve,
)
from cara_screening import principal
from cara_screening.cli import main
from cara_screening.config import RunConfig, SweepSettings
from cara_screening.sweep import run_sweep
from cara_screening.verify import dp_best_response, simulate_ce

BENCH = ModelParams(theta_L=1.0, theta_H=1.2, rho=1.0, sigma=1.0, alpha=0.5, w_L=0.0, w_H=0.0, mu_max=5.0)
QUAD = CostModel.quadratic(1.0)


def random_economy(rng, alpha_low=0.01):
    if rng.random() < 0.5:
        model = CostModel.quadratic(rng.uniform(0.3, 3.0))
    else:
        model = CostModel.power(rng.uniform(0.3, 3.0), rng.uniform(3.0, 7.0))
    theta_L = rng.uniform(0.3, 2.0)
    params = ModelParams(
        theta_L=theta_L,
        theta_H=theta_L * rng.uniform(1.01, 2.5),
        rho=rng.uniform(0.1, 4.0),
        sigma=rng.uniform(0.1, 2.5),
        alpha=rng.uniform(alpha_low, 0.99),
        mu_max=50.0,
    )
    return model, params


def benchmark_contracts():
    menu = solve(QUAD, BENCH).menu
    return menu, {"H": menu.contract_H, "L": menu.contract_L}


def test_c1_quadratic_closed_form(criterion):
    p = BENCH
    r2 = (p.theta_H / p.theta_L) ** 2
    mu_H = p.theta_H / (1 + p.rho * p.sigma**2 / p.theta_H**2)
    mu_L = p.theta_L / (1 + p.rho * p.sigma**2 / p.theta_L**2 + p.alpha / (1 - p.alpha) * (r2 - 1))
    rent = (r2 - 1) * mu_L**2 / 2
    rep = solve(QUAD, BENCH)
    errs = (abs(rep.menu.mu_H_star - mu_H), abs(rep.menu.mu_L_star - mu_L), abs(rep.rent - rent))
    ok = max(errs) <= 1e-8 and abs(mu_L - 0.4098360) < 1e-7 and abs(rent - 0.0369524) < 1e-7
    criterion(
        "C1", "quadratic closed-form equivalence",
        ok, f"mu_H={rep.menu.mu_H_star:.10f} mu_L={rep.menu.mu_L_star:.10f} rent={rep.rent:.10f} max_err={max(errs):.1e}",
    )


def test_c2_distortion_below_second_best(criterion):
    rng = np.random.default_rng(2)
    worst, strict_ok = -np.inf, True
    for i in range(50):
        model, params = random_economy(rng, alpha_low=0.001)
        distorted = effort_L_pch_slack(model, params)
        sb = second_best_effort(model, params, "L")
        worst = max(worst, distorted - sb)
        if params.alpha >= 0.01 and not distorted < sb:
            strict_ok = False
    criterion("C2", "distorted L effort <= second best (50 draws)", worst <= 1e-10 and strict_ok,
              f"max(mu_L - mu_SB)={worst:.3e}")


def test_c3_orderings(criterion):
    rng = np.random.default_rng(3)
    failures = 0
    for _ in range(100):
        model, params = random_economy(rng)
        mu = float(np.exp(rng.uniform(np.log(1e-6), np.log(3.0))))
        if not imitation_effort(model, params, mu, "H", "L") > mu:
            failures += 1
        if not rent_integrand(model, params, mu) > 0:
            failures += 1
        if not imitation_effort(model, params, mu, "L", "H") < mu:
            failures += 1
    criterion("C3", "effort and rent orderings (100 draws)", failures == 0, f"failures={failures}")


def test_c4_binding_constraints(criterion):
    rng = np.random.default_rng(4)
    menus = []
    while len(menus) < 60:
        model, params = random_economy(rng)
        rent = solve(model, params).rent
        params = dataclasses.replace(params, w_L=rng.uniform(-0.5, 0.5))
        params = dataclasses.replace(params, w_H=params.w_L + rng.uniform(0.0, 1.5) * rent)
        try:
            m = solve(model, params).menu
        except RegimeUnsupported:
            continue
        if m.regime is not Regime.L_TYPE_EXCLUDED:
            menus.append(m)
    menus.append(solve(QUAD, BENCH).menu)
    menus.append(solve(QUAD, dataclasses.replace(BENCH, w_H=0.045)).menu)
    worst = max(max(abs(m.pc_L_slack), abs(m.icc_H_slack), -m.icc_L_slack, -m.pc_H_slack) for m in menus)
    regimes = {m.regime.value for m in menus}
    criterion("C4", f"binding-constraint audit ({len(menus)} menus, regimes {sorted(regimes)})",
              worst <= 1e-8, f"worst violation={worst:.2e}")


def test_c5_round_trip(criterion):
    worst = 0.0
    for model in (QUAD, CostModel.power(1.3, 3.0), CostModel.power(0.7, 5.0)):
        for k in "HL":
            for mu in np.linspace(0.0, BENCH.mu_max, 10):
                for w in np.linspace(-2.0, 2.0, 10):
                    c = build_contract(model, BENCH, mu, w, k)
                    worst = max(worst, abs(best_response_effort(model, BENCH, c, k) - mu),
                                abs(certainty_equivalent(model, BENCH, c, k).value - w))
    criterion("C5", "build_contract round trip (10x10 grid per type and family)", worst <= 1e-10,
              f"max error={worst:.2e}")


def test_c6_dp_oracle(criterion):
    _, contracts = benchmark_contracts()
    ok, worst_eff, worst_val, worst_spread = True, 0.0, 0.0, 0.0
    for m, contract in contracts.items():
        for k in "HL":
            policy, value = dp_best_response(QUAD, BENCH, contract, k, n_steps=50,
                                             effort_grid=int(round(BENCH.mu_max / 1e-3)) + 1)
            closed = certainty_equivalent(QUAD, BENCH, contract, k)
            cell = policy.grid_step * (1 + 1e-9)
            eff = float(np.max(np.abs(policy.efforts - closed.effort)))
            worst_eff, worst_spread = max(worst_eff, eff), max(worst_spread, policy.spread)
            worst_val = max(worst_val, abs(value - closed.value))
            ok &= eff <= cell and policy.spread <= cell and abs(value - closed.value) <= 2e-3
    criterion("C6", "DP oracle: effort within one cell, value within 2e-3, constant policy", ok,
              f"effort err={worst_eff:.2e} value err={worst_val:.2e} spread={worst_spread:.1e}")


def test_c7_monte_carlo(criterion):
    _, contracts = benchmark_contracts()
    ok, details = True, []
    for m, contract in contracts.items():
        for k in "HL":
            closed = certainty_equivalent(QUAD, BENCH, contract, k)
            ce, se = simulate_ce(QUAD, BENCH, contract, k, closed.effort, 1_000_000, 50, seed=20240611)
            z = (ce - closed.value) / se
            ok &= abs(z) <= 3 and se < 2e-3
            details.append(f"{k}{m}:z={z:+.2f},se={se:.1e}")
    criterion("C7", "Monte Carlo within 3 SE, SE < 2e-3 (1e6 paths)", ok, " ".join(details))


def test_c8_regime_boundary(criterion):
    boundary = BENCH.w_L + rent_integrand(QUAD, BENCH, effort_L_pch_slack(QUAD, BENCH))
    h = 1e-4
    start = np.floor((boundary - 0.005) / h) * h
    steps = 101
    rows = run_sweep(RunConfig(params=BENCH, cost=QUAD), SweepSettings("w_H", start, start + (steps - 1) * h, steps))
    assert all(r["status"] == "ok" for r in rows)
    w = np.array([r["value"] for r in rows])
    mu = np.array([r["mu_L"] for r in rows])
    regimes = [r["regime"] for r in rows]
    flips = sum(a != b for a, b in zip(regimes, regimes[1:]))
    i = max(j for j, r in enumerate(regimes) if r == "PchSlack")
    # one-sided limits at the boundary, extrapolated from three points on each side
    left = np.polyval(np.polyfit(w[i - 2:i + 1], mu[i - 2:i + 1], 2), boundary)
    right = np.polyval(np.polyfit(w[i + 1:i + 4], mu[i + 1:i + 4], 2), boundary)
    ok = flips == 1 and regimes[i + 1] == "PchBinding" and w[i] < boundary < w[i + 1] and abs(left - right) <= 1e-7
    criterion("C8", "regime flips once; mu_L continuous at boundary", ok,
              f"boundary={boundary:.8f} |left-right|={abs(left - right):.1e} adjacent jump={mu[i + 1] - mu[i]:.2e}")


def test_c9_local_optimality(criterion):
    rng = np.random.default_rng(9)
    checked, worst = 0, np.inf
    while checked < 20:
        model, params = random_economy(rng)
        rent = solve(model, params).rent
        params = dataclasses.replace(params, w_H=rng.uniform(0.0, 1.2) * rent)
        try:
            rep = solve(model, params)
        except RegimeUnsupported:
            continue
        if rep.menu.regime is Regime.L_TYPE_EXCLUDED:
            continue
        mu = rep.menu.mu_L_star
        for x in (mu - 1e-2, mu + 1e-2):
            if x < 0:
                continue
            worst = min(worst, rep.principal_profit - principal.profit_for_L_effort(model, params, x))
        checked += 1
    criterion("C9", "profit at solved mu_L >= profit at mu_L +/- 1e-2 minus 1e-3 (20 draws)",
              worst >= -1e-3, f"min margin={worst:.3e}")


def test_c10_determinism(criterion, tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({
        "model": {"theta_L": 1.0, "theta_H": 1.2, "rho": 1.0, "sigma": 1.0, "alpha": 0.5, "w_L": 0.0, "w_H": 0.0},
        "cost": {"family": "quadratic", "kappa": 1.0},
        "solver": {"mu_max": 2.0},
        "verify": {"n_paths": 50000, "n_steps": 50, "seed": 77},
    }))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = [main(["verify", "--config", str(cfg), "--out", str(out)]) for out in (a, b)]
    criterion("C10", "verify twice gives byte-identical reports",
              codes == [0, 0] and a.read_bytes() == b.read_bytes(), f"exit codes={codes}")
