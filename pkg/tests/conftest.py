import numpy as np
import pytest

from liegeo import MetricOperator, build_so_basis, build_su_basis, build_torus_basis


@pytest.fixture(scope="session")
def so3():
    return build_so_basis(3)


@pytest.fixture(scope="session")
def so4():
    return build_so_basis(4)


@pytest.fixture(scope="session")
def su2():
    return build_su_basis(2, embed_so_subalgebra=True)


@pytest.fixture(scope="session")
def su3():
    return build_su_basis(3, embed_so_subalgebra=True)


@pytest.fixture(scope="session")
def torus():
    return build_torus_basis(2)


@pytest.fixture(scope="session")
def rigid3(so3):
    return MetricOperator.rigid_body(so3, [1.0, 2.0, 3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
