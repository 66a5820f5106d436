import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, m, lo=0.5, hi=2.0):
    """SPD matrix with eigenvalues uniform on [lo, hi] and a random eigenbasis."""
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    return (Q * rng.uniform(lo, hi, m)) @ Q.T


# Acceptance criteria report one PASS/FAIL line each at the end of the run.
_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record the measured quantities of an acceptance check."""
    marker = request.node.get_closest_marker("criterion")
    number = marker.args[0]

    def record(detail):
        _CRITERIA[number] = [request.node.nodeid, detail, None]

    _CRITERIA[number] = [request.node.nodeid, "no measurement recorded", None]
    return record


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if entry[0] == report.nodeid and (report.when == "call" or report.failed):
            if entry[2] is None or report.failed:
                entry[2] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        _, detail, outcome = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
