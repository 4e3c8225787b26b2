import pytest
from hypothesis import HealthCheck, settings

from amsfluid import SpectralSolution, reference_params
from amsfluid.model import derive_params

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed once at the end of the run
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def ref():
    return derive_params(reference_params())


@pytest.fixture(scope="session")
def ref_solution(ref):
    return SpectralSolution(ref)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
