import pytest

from cara_screening import CostModel, ModelParams


@pytest.fixture
def quad():
    return CostModel.quadratic(1.0)


@pytest.fixture
def bench():
    """Quadratic benchmark economy used throughout the suite."""
    return ModelParams(theta_L=1.0, theta_H=1.2, rho=1.0, sigma=1.0, alpha=0.5, w_L=0.0, w_H=0.0, mu_max=5.0)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion and fail the test if it does not hold."""

    def record(cid: str, description: str, ok: bool, detail: str = ""):
        request.config.stash[_ACCEPTANCE].append((cid, description, bool(ok), detail))
        print(f"{cid} {'PASS' if ok else 'FAIL'} {description} {detail}")
        assert ok, f"{cid} {description}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for cid, description, ok, detail in sorted(rows, key=lambda r: int(r[0][1:])):
        terminalreporter.write_line(f"{cid:4} {'PASS' if ok else 'FAIL'}  {description}  {detail}")
