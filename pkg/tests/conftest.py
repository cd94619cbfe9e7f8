import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_VERDICTS: dict[str, str] = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(key: str, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {key:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _VERDICTS[key] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_VERDICTS, key=int):
            terminalreporter.write_line(_VERDICTS[key])
