import numpy as np
import pytest

from sidebandlab import paper_device

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def device():
    """Published device preset at the reference detuning (-35 Hz)."""
    return paper_device()


@pytest.fixture(scope="session")
def device_neg20():
    """Detuning inside the self-sustained existence window."""
    return paper_device(delta=-TWO_PI * 20.0)


@pytest.fixture(scope="session")
def linear_system(device):
    """No pump, no conservative nonlinearity: exactly solvable."""
    return device.with_rwa(f_p=0.0, lambda11=0.0, lambda12=0.0,
                           lambda22=0.0)
