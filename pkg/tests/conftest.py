import pytest

from rabiwork import SystemParams, build_space


@pytest.fixture(scope="session")
def stock_params():
    """The circuit-QED working point used throughout: g = 0.05 omega,
    delta_minus = 8 g, omega0 = 0.6 omega."""
    return SystemParams(omega=1.0, omega0=0.6, g=0.05)


@pytest.fixture(scope="session")
def small_space():
    return build_space(8)


@pytest.fixture(scope="session")
def stock_epsilon():
    # 5% modulation of the atomic frequency
    return 0.05 * 0.6
