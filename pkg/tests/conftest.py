import re


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if match:
        status = "PASS" if report.passed else "FAIL"
        print(f"\nacceptance criterion {match.group(1)}: {status}")
