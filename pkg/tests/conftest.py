import os
import pathlib

import pytest
from hypothesis import settings

settings.register_profile("qlefschetz", deadline=None, derandomize=True, print_blob=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "qlefschetz"))

ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture
def configs():
    return ROOT / "configs"


ACCEPTANCE = []  # (criterion, passed, seconds, detail), filled by test_acceptance


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, secs, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'} ({secs:.2f}s) {detail}")
