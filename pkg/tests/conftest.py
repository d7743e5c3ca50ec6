import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> list of (part, outcome, seconds)
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.skipped):
        return
    n, label = mark.args
    if rep.passed and not hasattr(rep, "wasxfail"):
        status = "PASS"
    elif hasattr(rep, "wasxfail"):
        status = "FAIL (known, xfail)"
    elif rep.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    _CRITERIA.setdefault(n, [label, []])[1].append((item.name, status, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        label, parts = _CRITERIA[n]
        failed = [p for p in parts if p[1] != "PASS"]
        total = sum(p[2] for p in parts)
        verdict = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {n:2d} {verdict}  {label} ({total:.1f}s)")
        for name, status, _ in failed:
            tr.write_line(f"             {status}: {name}")
