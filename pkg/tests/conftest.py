import pytest

from whankel.hankel import default_plan

# acceptance outcomes, printed once at the end of the run
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def plans():
    cache = {}

    def get(alpha):
        if alpha not in cache:
            cache[alpha] = default_plan(alpha)
        return cache[alpha]

    return get


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
