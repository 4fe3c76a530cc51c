"""
Fixtures compartidas: bases, tensores y codificación (se construyen una vez por sesión)
"""
import pytest

from dfskit.services.dfs_encoding import octet_states
from dfskit.services.su_algebra import generate_basis, structure_constants


@pytest.fixture(scope="session")
def basis2():
    return generate_basis(2)


@pytest.fixture(scope="session")
def basis3():
    return generate_basis(3)


@pytest.fixture(scope="session")
def tensors3(basis3):
    return structure_constants(basis3)


@pytest.fixture(scope="session")
def encoding(basis3):
    return octet_states(basis3)
