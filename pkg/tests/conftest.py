import pytest
from hypothesis import HealthCheck, settings

from lubintate import kernel

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture], derandomize=True
)
settings.load_profile("repo")


@pytest.fixture(params=kernel.available_backends())
def backend(request):
    old = kernel.get_backend()
    kernel.set_backend(request.param)
    yield request.param
    kernel.set_backend(old)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
