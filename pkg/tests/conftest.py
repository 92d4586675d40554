import numpy as np
import pytest

from linopt import kernels
from linopt._accel import HAVE_NUMBA
from linopt.transfer import random_unitary

_ACCEPTANCE = []

PERMANENT_IMPLS = [pytest.param(kernels.permanent_numpy, id="numpy")]
BATCH_IMPLS = [pytest.param(kernels.permanents_numpy, id="numpy")]
TALLY_IMPLS = [pytest.param(kernels.tally_clicks_numpy, id="numpy")]
if HAVE_NUMBA:
    PERMANENT_IMPLS.append(pytest.param(kernels.permanent_numba, id="numba"))
    BATCH_IMPLS.append(pytest.param(kernels.permanents_numba, id="numba"))
    TALLY_IMPLS.append(pytest.param(kernels.tally_clicks_numba, id="numba"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def haar(rng):
    return lambda m: random_unitary(m, rng)


@pytest.fixture
def acceptance_report():
    return _ACCEPTANCE.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
