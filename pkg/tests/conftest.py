import pytest

from clring.backend import make_rng
from clring.scheme import enroll, make_ring, setup

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def system():
    return setup(rng=make_rng(20240611))


@pytest.fixture(scope="session")
def params(system):
    return system[0]


@pytest.fixture(scope="session")
def master(system):
    return system[1]


@pytest.fixture
def rng():
    return make_rng(7)


@pytest.fixture
def members(params, master):
    """Factory for ``n`` enrolled users with distinct identities."""
    counter = [0]

    def make(n, rng=None):
        rng = rng or make_rng(1000 + counter[0])
        base = counter[0]
        counter[0] += n
        return [enroll(params, master, b"member-%d" % (base + k), rng) for k in range(n)]

    return make


@pytest.fixture
def ring_of(members):
    def make(n, rng=None):
        bundles = members(n, rng)
        return bundles, make_ring(bundles)

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
