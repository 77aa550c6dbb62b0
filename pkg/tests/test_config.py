import json

import pytest

from cara_screening.config import parse_config
from cara_screening.errors import ConfigError

BENCH = {
    "model": {"theta_L": 1.0, "theta_H": 1.2, "rho": 1.0, "sigma": 1.0, "alpha": 0.5, "w_L": 0.0, "w_H": 0.0},
    "cost": {"family": "quadratic", "kappa": 1.0},
}


def with_changes(section, **changes):
    doc = json.loads(json.dumps(BENCH))
    doc.setdefault(section, {}).update(changes)
    return json.dumps(doc)


def errors_of(text):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    return err.value.errors


def test_benchmark_parses():
    cfg = parse_config(json.dumps(BENCH))
    assert cfg.params.theta_H == 1.2 and cfg.params.alpha == 0.5
    assert cfg.cost.family == "quadratic" and cfg.cost.kappa == 1.0
    assert cfg.params.mu_max == cfg.solver.mu_max == 5.0
    assert cfg.sweep is None
    assert cfg.verify.seed == 12345


def test_equal_thetas_name_both_fields():
    errs = errors_of(with_changes("model", theta_H=1.0))
    assert any("theta_H" in e and "theta_L" in e for e in errs)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
def test_alpha_boundaries(alpha):
    errs = errors_of(with_changes("model", alpha=alpha))
    assert any("alpha" in e for e in errs)


def test_all_errors_reported():
    doc = json.loads(json.dumps(BENCH))
    doc["model"].update(sigma=0.0, rho=-1.0, extra=3)
    doc["cost"]["kappa"] = 0
    doc["bogus"] = {}
    errs = errors_of(json.dumps(doc))
    for needle in ("model.sigma", "model.rho", "model.extra", "cost.kappa", "config.bogus"):
        assert any(needle in e for e in errs), needle


def test_malformed_json():
    assert "malformed" in errors_of("{not json")[0]


def test_missing_sections():
    errs = errors_of(json.dumps({"model": BENCH["model"]}))
    assert any(e.startswith("cost") for e in errs)


def test_power_family():
    cfg = parse_config(with_changes("cost", family="power", kappa=2.0, p=3.5))
    assert cfg.cost.p == 3.5
    assert any("cost.p" in e for e in errors_of(with_changes("cost", family="power", p=2.5)))
    assert any("cost.p" in e for e in errors_of(with_changes("cost", family="power")))


def test_booleans_are_not_numbers():
    assert any("model.sigma" in e for e in errors_of(with_changes("model", sigma=True)))


def test_sweep_section():
    cfg = parse_config(with_changes("sweep", parameter="alpha", **{"from": 0.1, "to": 0.9, "steps": 5}))
    assert cfg.sweep.parameter == "alpha" and cfg.sweep.steps == 5
    assert errors_of(with_changes("sweep", parameter="kappa", **{"from": 0, "to": 1, "steps": 3}))
    assert errors_of(with_changes("sweep", parameter="w_H", **{"from": 1, "to": 0, "steps": 3}))
    assert errors_of(with_changes("sweep", parameter="w_H", **{"from": 0, "to": 1, "steps": 0}))


def test_verify_and_solver_sections():
    cfg = parse_config(with_changes("verify", n_paths=1000, seed=5, effort_grid=0.01))
    assert (cfg.verify.n_paths, cfg.verify.seed, cfg.verify.effort_grid) == (1000, 5, 0.01)
    assert errors_of(with_changes("verify", n_paths=10.5))
    assert errors_of(with_changes("solver", mu_max=-1))


def test_to_dict_round_trip():
    cfg = parse_config(with_changes("sweep", parameter="sigma", **{"from": 0.1, "to": 2.0, "steps": 4}))
    assert parse_config(json.dumps(cfg.to_dict())) == cfg
