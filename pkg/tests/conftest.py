from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

#: One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
