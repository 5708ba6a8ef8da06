import re
from collections import defaultdict

from hypothesis import settings

# sympy oracles are slow on complex entries; exactness matters, not speed
settings.register_profile("invsub", deadline=None)
settings.load_profile("invsub")

_criteria = defaultdict(list)


def pytest_runtest_logreport(report):
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if m and (report.when == "call" or report.outcome != "passed"):
        _criteria[int(m.group(1))].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        outcomes = _criteria[k]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}: {status}")

