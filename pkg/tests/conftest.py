import json

import pytest

from rabi_vqe import cli
from rabi_vqe.config import ExperimentConfig

_CRITERIA: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        verdict = "PASS" if report.passed else "FAIL"
        _CRITERIA[props["criterion"]] = f"criterion {props['criterion']}: {verdict}  {props.get('detail', '')}"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[key])


ACCEPTANCE_SWEEP = ExperimentConfig(p_max=14, jobs=1)


@pytest.fixture(scope="session")
def acceptance_sweeps(tmp_path_factory):
    """Default Omega sweep run twice from scratch; returns (config, first dir, second dir)."""
    dirs = []
    for tag in ("first", "second"):
        out = tmp_path_factory.mktemp(f"sweep_{tag}")
        cli.cmd_sweep(ACCEPTANCE_SWEEP.replace(out_dir=str(out)))
        dirs.append(out)
    return ACCEPTANCE_SWEEP, dirs[0], dirs[1]


@pytest.fixture(scope="session")
def sweep_points(acceptance_sweeps):
    cfg, first, _ = acceptance_sweeps
    return {om: json.loads((first / f"sweep_Omega{om:g}.json").read_text()) for om in cfg.omega_list}
