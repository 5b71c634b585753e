import pytest
from hypothesis import HealthCheck, settings

from hilbstab.surface import preset

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

PRESET_NAMES = ["k3", "k3:1", "k3_rho2", "elliptic", "quintic"]
K_TRIVIAL = ["k3", "k3:1", "k3:3", "k3_rho2"]


@pytest.fixture(params=PRESET_NAMES)
def surface(request):
    return preset(request.param)


@pytest.fixture
def k3():
    return preset("k3")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
