import numpy as np
import pytest

from mbmlab.noise import TimeGrid, gen_brownian


@pytest.fixture(scope="session")
def bm21():
    """Brownian path on [-21, 21] with step 2^-10."""
    return gen_brownian(TimeGrid.symmetric(21.0, 2.0 ** -10), 11)


@pytest.fixture(scope="session")
def chirp_fine():
    from mbmlab.hurst import build_chirp
    from mbmlab.regularity import Sampled

    n = 2 ** 18
    x = np.linspace(-1.0, 1.0, n + 1)
    return Sampled(-1.0, 2.0 / n, build_chirp(0.5, 1.0)(x))


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
