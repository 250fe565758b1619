import pytest

from semid.modelfile import load_fixture


@pytest.fixture(scope="session")
def smoke():
    return load_fixture("SMOKE").diagram()


@pytest.fixture(scope="session")
def iv():
    return load_fixture("IV").diagram()


@pytest.fixture(scope="session")
def coll():
    return load_fixture("COLL").diagram()


@pytest.fixture(scope="session")
def bow():
    return load_fixture("BOW").diagram()


_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion and print it."""

    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        request.config.stash[_LINES].append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
