import math

import numpy as np
import pytest

from matsusy.catalog import MatrixFunction

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    marks = getattr(report, "acceptance", None)
    if marks is None:
        return
    number, title = marks
    if report.when == "call" or report.outcome == "failed":
        prev = _ACCEPTANCE.get(number, (None, ""))[0]
        if prev != "FAIL":
            _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        rep.acceptance = (int(mark.args[0]), str(mark.args[1]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        verdict, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {title}")


def constant_potential(value: float = 0.0, domain=(-math.inf, math.inf)) -> MatrixFunction:
    """value * I on the given domain, flagged scalar."""

    def val(x):
        out = np.zeros(np.shape(x) + (2, 2))
        out[..., 0, 0] = value
        out[..., 1, 1] = value
        return out

    def der(x):
        return np.zeros(np.shape(x) + (2, 2))

    return MatrixFunction(val, der, domain, scalar=True, label=f"{value}I")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
