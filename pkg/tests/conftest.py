import pytest

from wssus_capacity import LinkConfig, PowerBudget, brick, get_constellation

# Numerical experiment parameters: TF = 1.25, P = 1 mW, N0 = 4.14e-21 W/Hz,
# brick scattering with spread 1e-3 and sigma2 = -90 dB.
EXP_P = 1e-3
EXP_N0 = 4.14e-21
EXP_SIGMA2 = 1e-9
EXP_TF = 1.25
RHO_SIGMA2 = EXP_P * EXP_SIGMA2 / EXP_N0  # 2.4155e8 nat/s

_ACCEPTANCE = []


def experiment_config(beta=1.0, P=EXP_P, N0=EXP_N0, sigma2=EXP_SIGMA2):
    return LinkConfig(brick(sigma2=sigma2), PowerBudget(P, N0, beta), EXP_TF)


@pytest.fixture
def cfg():
    return experiment_config()


@pytest.fixture(scope="session")
def qpsk():
    return get_constellation("qpsk")


@pytest.fixture
def acceptance_record():
    def record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
