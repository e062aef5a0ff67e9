import numpy as np
import pytest

_ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label, summary): acceptance criterion test")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label, summary = marker.args
        _ACCEPTANCE_RESULTS.append((label, summary, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    merged = {}
    for label, summary, outcome in _ACCEPTANCE_RESULTS:
        # parametrized criteria pass only if every case passes
        _, previous = merged.get(label, (summary, "passed"))
        merged[label] = (summary, outcome if previous == "passed" else previous)
    for label in sorted(merged, key=_sort_key):
        summary, outcome = merged[label]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {label:<4} {status}  {summary}")


def _sort_key(label):
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label
