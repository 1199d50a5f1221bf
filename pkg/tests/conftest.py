import numpy as np
import pytest

from nkcloud import NkLandscape, generate_landscape

# One verdict line per acceptance criterion, filled in by test_acceptance
# and echoed after the run so the lines survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def hand_landscape():
    """Two loci linked to each other, tables chosen for hand-checkable sums.

    Locus tables are indexed own-bit-first, so with g = (g0, g1) the
    contributions are t0[g0 + 2*g1] and t1[g1 + 2*g0], giving fitness
    (index order 00, 10, 01, 11): 0.15, 0.55, 0.6, 0.6.
    """
    links = [[1], [0]]
    tables = [[0.1, 0.6, 0.3, 0.8],
              [0.2, 0.9, 0.5, 0.4]]
    return NkLandscape(2, 1, np.array(links), np.array(tables))


@pytest.fixture(scope="session")
def distinct_landscape():
    """Like hand_landscape but with four distinct fitness values
    (0.15, 0.55, 0.6, 0.62), so every 0.002 bin is a singleton."""
    links = [[1], [0]]
    tables = [[0.1, 0.6, 0.3, 0.8],
              [0.2, 0.9, 0.5, 0.44]]
    return NkLandscape(2, 1, np.array(links), np.array(tables))


@pytest.fixture(scope="session")
def rand8():
    return generate_landscape(8, 3, seed=7)


@pytest.fixture(scope="session")
def rand10():
    return generate_landscape(10, 4, seed=3)


@pytest.fixture(scope="session")
def constant_landscape():
    """Six loci, every table entry 0.5: all genotypes share one fitness."""
    n, k = 6, 2
    links = np.array([[(i + 1) % n, (i + 2) % n] for i in range(n)])
    tables = np.full((n, 1 << (k + 1)), 0.5)
    return NkLandscape(n, k, links, tables)
