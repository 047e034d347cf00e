import sys
from pathlib import Path

import pytest

from afcs import theory
from afcs.montecarlo import run_trials
from afcs.params import SystemConfig, config_for_q_sq, derive, load_config

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE_CFG = ROOT / "configs" / "acceptance.cfg"

_acceptance_lines = []


def make_config(q_sq=3.0, **fields):
    """SystemConfig with A0 scaled to hit ``q_sq`` exactly (up to rounding)."""
    return config_for_q_sq(SystemConfig(**fields), q_sq)


@pytest.fixture(scope="session")
def acceptance_config():
    return load_config(ACCEPTANCE_CFG)


@pytest.fixture(scope="session")
def acceptance_run(acceptance_config):
    derived = derive(acceptance_config)
    profile = theory.build_profile(derived, acceptance_config)
    stats = run_trials(acceptance_config, profile, 5000, 12345, derived)
    return acceptance_config, derived, profile, stats


@pytest.fixture
def acceptance_report():
    def record(number, title, passed, detail):
        _acceptance_lines.append((number, title, passed, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_acceptance_lines):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}")
