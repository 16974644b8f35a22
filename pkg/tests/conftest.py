import pytest

from encost import builtin_catalog, builtin_matrix_catalog


@pytest.fixture(scope="session")
def catalog_by_name():
    return {p.name: p for p in builtin_catalog()}


@pytest.fixture(scope="session")
def xeon(catalog_by_name):
    return catalog_by_name["Xeon"]


@pytest.fixture(scope="session")
def xeon_phi(catalog_by_name):
    return catalog_by_name["Xeon-Phi"]


@pytest.fixture(scope="session")
def matrices_by_name():
    return {m.name: m for m in builtin_matrix_catalog()}


@pytest.fixture(scope="session")
def torso1(matrices_by_name):
    return matrices_by_name["torso1"]
