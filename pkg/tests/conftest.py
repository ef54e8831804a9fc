import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_results: dict[int, list[tuple[str, bool]]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _results.setdefault(int(m.group(1)), []).append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        runs = _results[k]
        ok = all(passed for _, passed in runs)
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {CRITERIA.get(k, '')}")
        for name, passed in runs:
            if not passed:
                terminalreporter.write_line(f"    failed: {name}")
