import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

EXAMPLE_SOURCE = """\
main :: IO ()
main = do
    x <- clean_files
    let y = complex_evaluation x
    z <- semantic_analysis
    print (y, z)
"""

_criteria: dict = {}


@pytest.fixture
def example_source():
    return EXAMPLE_SOURCE


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if report.skipped and isinstance(report.longrepr, tuple):
            status += f" ({report.longrepr[2]})"
        _criteria[number] = f"criterion {number} [{title}]: {status}"


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_criteria):
            terminalreporter.write_line(_criteria[number])
