import numpy as np
import pytest

from app.cli import _GROUPS
from service.dual_functionals import Functional
from service.finite_groups import cyclic_group, klein_four, symmetric_group
from service.quantum_group import function_algebra, group_algebra

BUILTIN_NAMES = [f'{flavour}:{group}' for flavour in 'cg' for group in _GROUPS]


def point_mass(d: int, *support: int) -> Functional:
    """support 上の一様確率（C(G) 上の状態）"""
    covec = np.zeros(d, dtype=complex)
    for g in support:
        covec[g] += 1.0 / len(support)
    return Functional(covec)


@pytest.fixture(scope='session')
def c_z2():
    return function_algebra(cyclic_group(2))


@pytest.fixture(scope='session')
def c_z3():
    return function_algebra(cyclic_group(3))


@pytest.fixture(scope='session')
def c_z4():
    return function_algebra(cyclic_group(4))


@pytest.fixture(scope='session')
def c_klein():
    return function_algebra(klein_four())


@pytest.fixture(scope='session')
def c_s3():
    return function_algebra(symmetric_group(3))


@pytest.fixture(scope='session')
def g_s3():
    return group_algebra(symmetric_group(3))
