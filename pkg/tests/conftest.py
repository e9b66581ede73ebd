import os
import sys

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None:
        return
    lines = {int(line.split()[1]): line for line in mod.RESULTS}
    reports = terminalreporter.stats.get("passed", []) + terminalreporter.stats.get("failed", [])
    ran = {int(r.nodeid.split("test_criterion_")[1][:2]) for r in reports
           if "test_criterion_" in getattr(r, "nodeid", "")}
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines.keys() | ran):
        terminalreporter.write_line(lines.get(n, f"criterion {n:2d} FAIL  raised before reaching a verdict"))
