import pytest

from hiagg import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay any JIT compile cost once, before timed tests run
    kernels.warm_up()
