"""Command-line interface.

Exit codes: 0 success, 2 invalid configuration or input file, 3 regime not
supported, 4 numerical or bracketing failure, 5 audit failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import agent
from .config import RunConfig, load_config
from .errors import BracketError, ConfigError, DomainError, NumericError, RegimeUnsupported
from .principal import solve
from .report import (
    audit_report_to_dict,
    dumps,
    format_menu_table,
    solve_report_from_dict,
    solve_report_to_dict,
    write_sweep_csv,
)
from .sweep import default_workers, run_sweep
from .verify import DPSettings, MonteCarloSettings, audit_menu, simulate_ce

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_NUMERIC = 4
EXIT_AUDIT = 5


def _default_out(config_path: str, suffix: str) -> Path:
    p = Path(config_path)
    return p.with_name(p.stem + suffix)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_solve(args) -> int:
    config = load_config(args.config)
    rep = solve(config.cost, config.params, config.solver.binding_tol, config.solver.residual_tol)
    print(format_menu_table(rep))
    out = Path(args.out) if args.out else _default_out(args.config, ".report.json")
    _write(out, dumps(solve_report_to_dict(rep, config.to_dict())))
    print(f"\nreport written to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if config.sweep is None:
        raise ConfigError(["sweep: missing section"])
    rows = run_sweep(config, workers=args.workers or default_workers())
    write_sweep_csv(args.out, rows)
    ok = sum(r["status"] == "ok" for r in rows)
    print(f"{len(rows)} points ({ok} solved) written to {args.out}")
    return EXIT_OK


def _verify_settings(config: RunConfig, args) -> tuple[MonteCarloSettings, DPSettings]:
    v = config.verify
    mc = MonteCarloSettings(
        n_paths=args.paths or v.n_paths,
        n_steps=args.steps or v.n_steps,
        seed=v.seed if args.seed is None else args.seed,
        workers=default_workers(),
    )
    return mc, DPSettings(n_steps=args.steps or v.n_steps, effort_step=v.effort_grid)


def _load_menu(path: str):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return solve_report_from_dict(doc).menu
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError([f"cannot read menu from {path}: {exc}"]) from None


def cmd_verify(args) -> int:
    config = load_config(args.config)
    menu = _load_menu(args.menu) if args.menu else solve(
        config.cost, config.params, config.solver.binding_tol, config.solver.residual_tol
    ).menu
    mc, dp = _verify_settings(config, args)
    audit = audit_menu(
        config.cost, config.params, menu, mc, dp,
        binding_tol=config.solver.binding_tol,
        mc_sigmas=config.verify.mc_sigmas,
        dp_value_tol=config.verify.dp_value_tol,
    )
    settings = {
        "n_paths": mc.n_paths, "n_steps": mc.n_steps, "seed": mc.seed,
        "effort_grid": dp.effort_step, "mc_sigmas": config.verify.mc_sigmas,
        "dp_value_tol": config.verify.dp_value_tol, "binding_tol": config.solver.binding_tol,
    }
    out = Path(args.out) if args.out else _default_out(args.config, ".audit.json")
    _write(out, dumps(audit_report_to_dict(audit, menu, settings)))

    print(f"{'agent':5} {'contract':8} {'closed form':>12} {'monte carlo':>12} {'se':>10} {'dp':>12}")
    for p in audit.pairs:
        print(f"{p.agent_type:5} {p.contract_type:8} {p.closed_form:12.6g} {p.mc:12.6g} {p.mc_se:10.3g} {p.dp:12.6g}")
    for name, value in audit.slacks.items():
        print(f"{name:12} {value:.6g}")
    for flag in audit.flags:
        print(f"flag: {flag}")
    failures = audit.failures()
    for c in failures:
        print(f"FAIL {c.name}: {c.value:.6g} (tolerance {c.tolerance:.3g}) {c.detail}".rstrip())
    print(f"{len(audit.checks) - len(failures)}/{len(audit.checks)} checks passed; report written to {out}")
    return EXIT_AUDIT if failures else EXIT_OK


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    rep = solve(config.cost, config.params, config.solver.binding_tol, config.solver.residual_tol)
    contract = rep.menu.contract_H if args.contract == "H" else rep.menu.contract_L
    if contract is None:
        raise DomainError("the solved menu has no L-contract (L-type excluded)")
    mu = args.effort
    if mu is None:
        mu = agent.best_response_effort(config.cost, config.params, contract, args.type)
    closed = agent.certainty_equivalent_at(config.cost, config.params, contract, args.type, mu)
    v = config.verify
    ce, se = simulate_ce(
        config.cost, config.params, contract, args.type, mu,
        args.paths or v.n_paths, args.steps or v.n_steps,
        v.seed if args.seed is None else args.seed, default_workers(),
    )
    print(f"type {args.type} on {args.contract}-contract, effort {mu:.6g}")
    print(f"certainty equivalent {ce:.6g} +/- {se:.3g} (closed form {closed:.6g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cara-screening",
        description="Optimal menus of linear contracts under moral hazard and two-type screening.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve for the optimal menu")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="report file (default: <config>.report.json)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a one-parameter grid and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, help="parallel solves (default: $CARA_SCREENING_WORKERS or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="solve, then audit the menu with Monte Carlo and DP oracles")
    p.add_argument("--config", required=True)
    p.add_argument("--menu", help="audit the menu in this solve report instead of solving")
    p.add_argument("--paths", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="audit file (default: <config>.audit.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo certainty equivalent of one agent on one contract")
    p.add_argument("--config", required=True)
    p.add_argument("--type", required=True, choices=("H", "L"))
    p.add_argument("--contract", required=True, choices=("H", "L"))
    p.add_argument("--effort", type=float, help="constant effort (default: best response)")
    p.add_argument("--paths", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeUnsupported as exc:
        print(f"regime unsupported ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (BracketError, NumericError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
