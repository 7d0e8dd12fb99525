import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

_CRITERIA: dict[str, tuple[bool, str]] = {}


class CriterionLog:
    def __init__(self, name):
        self.name = name
        _CRITERIA[name] = (False, "did not finish")

    def check(self, ok, detail=""):
        _CRITERIA[self.name] = (bool(ok), detail)
        assert ok, f"{self.name}: {detail}"


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the end-of-run summary."""
    return CriterionLog(request.node.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
