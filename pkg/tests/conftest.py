import numpy as np
import pytest

from optosqueeze.params import FloquetAmplitudes, SystemParams, compute_couplings


@pytest.fixture
def ref_params():
    return SystemParams(kappa=0.1, gamma=1e-6, g=1e-4, n_a=0.0, n_b=10.0, detuning=1.0)


@pytest.fixture
def ref_floquet():
    return FloquetAmplitudes(a_m1=0.8, a_0=2.0, a_1=0.8, b_m1=25.0, b_0=100.0, b_1=62.5, Omega_a=2.0, Omega_b=2.0)


@pytest.fixture
def ref_couplings(ref_params, ref_floquet):
    return compute_couplings(ref_params, ref_floquet)


ZERO_FLOQUET = FloquetAmplitudes(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    def report(number, passed, detail):
        line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
