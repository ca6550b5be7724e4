import pytest

from src.SubRiem.catalog import get_entry


@pytest.fixture
def heisenberg():
    return get_entry("heisenberg").spec


@pytest.fixture
def su2():
    return get_entry("su2").spec


@pytest.fixture
def affine():
    return get_entry("affine").spec


@pytest.fixture
def heisenberg_rotated():
    return get_entry("heisenberg-rotated").spec


@pytest.fixture
def euclidean3():
    return get_entry("euclidean3").spec
