import numpy as np
import pytest

from minkembed import generators, metric_space
from minkembed.dimension import estimate_quasidoubling_constant
from minkembed.embedding import build_embedding
from minkembed.params import strict_params

_criteria = {}


def line_space(xs):
    x = np.asarray(xs, dtype=float)
    return metric_space.validate_space(np.abs(x[:, None] - x[None, :]))


@pytest.fixture
def line():
    return line_space


def strict_fixture(size, eps=0.75, theta=0.5, delta=1.2):
    space, _ = metric_space.normalize_diameter(generators.interval(size))
    q = estimate_quasidoubling_constant(space, theta, delta, warn=False)
    p = strict_params(eps, theta, delta, q.C, diameter=space.diameter)
    return space, q, p, build_embedding(space, p, timestamp="fixed")


@pytest.fixture(scope="session")
def a1():
    """8 evenly spaced points, strict parameters; the main theorem fixture."""
    return strict_fixture(8)


@pytest.fixture(scope="session")
def four_point():
    return strict_fixture(4)


# -- one summary line per acceptance criterion ------------------------------

@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and not rep.failed:
        return
    _criteria.setdefault(mark.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria):
        results = _criteria[cid]
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{cid}: {status} ({sum(results)}/{len(results)} checks)")
