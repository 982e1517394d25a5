import sys


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "SUMMARY", None)
    if not lines:
        return
    terminalreporter.section("acceptance")
    for line in lines:
        terminalreporter.write_line(line)
