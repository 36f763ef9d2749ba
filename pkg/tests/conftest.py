import numpy as np
import pytest

from wallach_geo import (
    build_product_spheres,
    build_so_blocks,
    build_stiefel,
    build_su3_flag,
)

SPACE_BUILDERS = {
    "so-blocks(1,1,1)": lambda: build_so_blocks(1, 1, 1),
    "so-blocks(2,2,2)": lambda: build_so_blocks(2, 2, 2),
    "so-blocks(2,3,4)": lambda: build_so_blocks(2, 3, 4),
    "stiefel(2)": lambda: build_stiefel(2),
    "stiefel(3)": lambda: build_stiefel(3),
    "su3-flag": lambda: build_su3_flag(),
    "product-spheres": lambda: build_product_spheres(),
}


def make_rng(seed=0):
    return np.random.default_rng(np.random.Philox(seed))


@pytest.fixture(scope="session")
def spaces():
    """All catalog spaces, built once per test session."""
    return {name: build() for name, build in SPACE_BUILDERS.items()}


@pytest.fixture(scope="session")
def stiefel3(spaces):
    return spaces["stiefel(3)"]


@pytest.fixture(scope="session")
def su3(spaces):
    return spaces["su3-flag"]


@pytest.fixture(scope="session")
def so222(spaces):
    return spaces["so-blocks(2,2,2)"]
