"""Shared fixtures: canonical parameter sets read from the shipped configs."""

from pathlib import Path

import pytest

from pmcorner.config import load_config
from pmcorner.params import derive_parameters

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def configs_dir():
    return CONFIGS


@pytest.fixture(scope="session")
def meridian_cfg():
    return load_config(CONFIGS / "ridge-meridian.cfg")


@pytest.fixture(scope="session")
def meridian_ps(meridian_cfg):
    return derive_parameters({"scenario": "meridian", **meridian_cfg.seed()})


_CRITERIA = {}


def record_criterion(number, passed, detail):
    """Store one acceptance line; printed in the terminal summary."""
    _CRITERIA[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        passed, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")
