"""Machine-readable reports (JSON, CSV) and the human-readable menu table.

Floats are written with Python's shortest round-trip repr, so reading a report
back yields bit-identical values. NaN is written as ``null``.
"""

from __future__ import annotations

import csv
import json
import math
from typing import Any, Iterable, Optional

from .agent import LinearContract
from .principal import ContractMenu, Regime, SolveReport
from .verify import AuditReport

SOLVE_SCHEMA = "cara-screening/solve-report/1"
AUDIT_SCHEMA = "cara-screening/audit-report/1"


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n"


def contract_to_dict(c: Optional[LinearContract]) -> Optional[dict]:
    if c is None:
        return None
    return {"slope": c.slope, "intercept": c.intercept, "designed_for": c.designed_for}


def contract_from_dict(d: Optional[dict]) -> Optional[LinearContract]:
    if d is None:
        return None
    return LinearContract(slope=float(d["slope"]), intercept=float(d["intercept"]), designed_for=d["designed_for"])


_MENU_FLOATS = (
    "mu_H_star", "mu_L_star", "mu_HL_star", "ce_H_offered", "ce_L_offered",
    "icc_H_slack", "icc_L_slack", "pc_H_slack", "pc_L_slack",
)


def menu_to_dict(menu: ContractMenu) -> dict[str, Any]:
    out: dict[str, Any] = {
        "regime": menu.regime.value,
        "contract_H": contract_to_dict(menu.contract_H),
        "contract_L": contract_to_dict(menu.contract_L),
    }
    for key in _MENU_FLOATS:
        out[key] = getattr(menu, key)
    return out


def menu_from_dict(d: dict) -> ContractMenu:
    values = {key: (None if d.get(key) is None else float(d[key])) for key in _MENU_FLOATS}
    return ContractMenu(
        contract_H=contract_from_dict(d["contract_H"]),
        contract_L=contract_from_dict(d.get("contract_L")),
        regime=Regime(d["regime"]),
        **values,
    )


def solve_report_to_dict(report: SolveReport, config: Optional[dict] = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"schema": SOLVE_SCHEMA}
    if config is not None:
        doc["config"] = config
    doc.update(
        menu=menu_to_dict(report.menu),
        principal_profit=report.principal_profit,
        rent=report.rent,
        second_best_efforts={"H": report.second_best_efforts[0], "L": report.second_best_efforts[1]},
        residuals=dict(report.residuals),
        notes=list(report.notes),
    )
    return doc


def solve_report_from_dict(doc: dict) -> SolveReport:
    if doc.get("schema") != SOLVE_SCHEMA:
        raise ValueError(f"not a solve report (schema {doc.get('schema')!r})")
    sb = doc["second_best_efforts"]
    return SolveReport(
        menu=menu_from_dict(doc["menu"]),
        principal_profit=float(doc["principal_profit"]),
        rent=float(doc["rent"]),
        second_best_efforts=(float(sb["H"]), float(sb["L"])),
        residuals={k: float(v) for k, v in doc["residuals"].items()},
        notes=list(doc.get("notes", [])),
    )


def audit_report_to_dict(audit: AuditReport, menu: ContractMenu, settings: dict) -> dict[str, Any]:
    return {
        "schema": AUDIT_SCHEMA,
        "passed": audit.passed,
        "settings": settings,
        "menu": menu_to_dict(menu),
        "pairs": [vars(p).copy() for p in audit.pairs],
        "slacks": dict(audit.slacks),
        "checks": [vars(c).copy() for c in audit.checks],
        "flags": list(audit.flags),
    }


def _g(x) -> str:
    return "-" if x is None else f"{x:.6g}"


def format_menu_table(report: SolveReport) -> str:
    m = report.menu
    rows = [("", "H-contract", "L-contract")]
    cl = m.contract_L
    rows += [
        ("effort", _g(m.mu_H_star), _g(m.mu_L_star) if cl else "-"),
        ("slope", _g(m.contract_H.slope), _g(cl.slope if cl else None)),
        ("intercept", _g(m.contract_H.intercept), _g(cl.intercept if cl else None)),
        ("CE offered", _g(m.ce_H_offered), _g(m.ce_L_offered) if cl else "-"),
        ("ICC slack", _g(m.icc_H_slack), _g(m.icc_L_slack)),
        ("PC slack", _g(m.pc_H_slack), _g(m.pc_L_slack)),
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines += [
        "",
        f"regime             {m.regime.value}",
        f"H imitation effort {_g(m.mu_HL_star)}",
        f"information rent   {_g(report.rent)}",
        f"expected profit    {_g(report.principal_profit)}",
        f"second best (H, L) {_g(report.second_best_efforts[0])}, {_g(report.second_best_efforts[1])}",
    ]
    lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines)


SWEEP_COLUMNS = (
    "index", "parameter", "value", "status", "regime", "mu_L", "mu_H", "rent", "profit",
    "icc_H_slack", "icc_L_slack", "pc_H_slack", "pc_L_slack", "detail",
)


def write_sweep_csv(path, rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else (repr(row[k]) if isinstance(row[k], float) else row[k]))
                             for k in SWEEP_COLUMNS})


def read_sweep_csv(path) -> list[dict]:
    numeric = set(SWEEP_COLUMNS) - {"parameter", "status", "regime", "detail", "index"}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            parsed: dict[str, Any] = dict(row)
            parsed["index"] = int(row["index"])
            for k in numeric:
                parsed[k] = float(row[k]) if row[k] != "" else None
            out.append(parsed)
    return out
