import pytest

from complexae import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the active backend's kernels before any timed test runs."""
    kernels.warmup()
