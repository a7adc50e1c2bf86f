import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

REPO_ROOT = Path(__file__).resolve().parents[1]
TOY_DIR = REPO_ROOT / "data" / "toy"

_acceptance_results: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY_DIR


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: criterion-level checks reported one line each"
    )


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "acceptance" in getattr(report, "keywords", {}):
        _acceptance_results.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")
