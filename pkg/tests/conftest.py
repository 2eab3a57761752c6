import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from warpgeo import scenario as scn
from warpgeo import estimates
from warpgeo.errors import HypothesisFailed
from warpgeo.estimates import Context

settings.register_profile(
    "warpgeo", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "warpgeo"))

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    k = mark.args[0]
    detail = dict(item.user_properties).get("detail", "")
    if rep.when == "setup" and not rep.failed:
        return
    _CRITERIA[k] = (rep.passed, detail if rep.passed else (detail or str(rep.longrepr).splitlines()[-1]))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def builtin_runs():
    """Every builtin scenario with its context and ``verify_all`` results, computed once."""
    out = {}
    for name in scn.builtin_names():
        sc = scn.load_builtin(name)
        ctx = Context(sc)
        results = []
        for th in sc.theorems:
            try:
                results.append((th, estimates.verify(sc, th, ctx), None))
            except HypothesisFailed as err:
                results.append((th, err.report, err))
        out[name] = (sc, ctx, results)
    return out


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)

