import sys
import warnings

import pytest

from optosnr import FeedbackConfig, MeasurementPlan, PhysicalParams, PulseForce
from optosnr.errors import CoolingTimeWarning

FIG1_WM = 11.7e6
FIG1_GM = 270.0


@pytest.fixture
def fig1_params():
    return PhysicalParams(FIG1_WM, FIG1_GM, 10.3, 0.99, 4.0)


@pytest.fixture
def fig1_plan():
    return MeasurementPlan(11e-6, 2e-6)


@pytest.fixture
def fig1_pulse():
    return PulseForce(1.0, 5.5e-6, 3.7e-6, FIG1_WM)


@pytest.fixture
def cold_damping():
    return FeedbackConfig("cold-damping", 82.4e3)


@pytest.fixture
def toy_params():
    """Dimensionless resonator: omega_m = 1, Q = 50."""
    return PhysicalParams(1.0, 0.02, 1.0, 1.0, 0.0)


@pytest.fixture(autouse=True)
def _quiet_cooling_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoolingTimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
