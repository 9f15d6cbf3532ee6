import pytest

from loewnerflow.verify import builtin_families

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record(key, passed, text):
    ACCEPTANCE_LINES[key] = f"[{'PASS' if passed else 'FAIL'}] {text}"
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0][2:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def families():
    return builtin_families()
