import numpy as np
import pytest

from it2fnn import _pykernels

try:
    from it2fnn import _ext
except ImportError:  # compiled kernels not built
    _ext = None

KERNEL_BACKENDS = [pytest.param(_pykernels, id="python")]
if _ext is not None:
    KERNEL_BACKENDS.append(pytest.param(_ext, id="cython"))


@pytest.fixture(params=KERNEL_BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory):
    """A small PhysioNet-style directory of synthetic walks for all three sub-datasets."""
    from gaitgen import write_dataset

    d = tmp_path_factory.mktemp("gaitdata")
    counts = {("Ga", "Pt"): 4, ("Ga", "Co"): 4, ("Ju", "Pt"): 3, ("Ju", "Co"): 3, ("Si", "Pt"): 3, ("Si", "Co"): 3}
    write_dataset(d, np.random.default_rng(2024), counts, duration=70.0)
    return d


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        state = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        ACCEPTANCE.setdefault(marker, state)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("acceptance")
    if m is not None:
        outcome.get_result().acceptance = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), state in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {number} ({title}): {state}")
