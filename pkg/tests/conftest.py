import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture]
)
settings.load_profile("default")

_VERDICTS: dict[int, list[tuple[bool, str]]] = {}


class Verdicts:
    """Collects per-criterion outcomes for the terminal summary."""

    def __init__(self, number: int):
        self.number = number
        _VERDICTS.setdefault(number, [])

    def check(self, ok: bool, detail: str) -> bool:
        _VERDICTS[self.number].append((bool(ok), detail))
        return bool(ok)

    @property
    def failures(self) -> list[str]:
        return [d for passed, d in _VERDICTS[self.number] if not passed]


@pytest.fixture
def verdict(request):
    marker = request.node.get_closest_marker("criterion")
    return Verdicts(marker.args[0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" or not report.failed:
        return
    checks = _VERDICTS.setdefault(marker.args[0], [])
    if all(passed for passed, _ in checks):
        # the test raised before recording a failing check
        checks.append((False, f"{item.name} raised {call.excinfo.typename}"))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        checks = _VERDICTS[number]
        ok = bool(checks) and all(passed for passed, _ in checks)
        failed = [d for passed, d in checks if not passed]
        if not checks:
            detail = "no checks recorded"
        else:
            detail = "; ".join(failed) if failed else f"{len(checks)} checks"
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
