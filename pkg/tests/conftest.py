# -*- coding: utf-8 -*-
"""
Defines fixtures available to all tests.
"""

import os

import numpy as np
import pytest

os.environ.setdefault("BFMHT_ENV", "test")

from bfmht.settings import TestSettings  # noqa: E402
from bfmht.torus import torus_dense_matrix, torus_factorization  # noqa: E402
from bfmht.trees import torus_grid  # noqa: E402

from .factories import PointCloudFactory  # noqa: E402


@pytest.fixture(scope="session")
def settings():
    """
    Single-threaded settings with the block-error assertion on.
    """
    return TestSettings()


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def small_torus():
    """
    Torus transform on a 16 x 16 grid with 24 columns, factored to 1e-9.

    Returns ``(factorization, basis, points, dense matrix)``.
    """
    bf, basis, cloud = torus_factorization(16, 24, 1e-9, space_leaf_size=16, freq_leaf_size=4)
    return bf, basis, cloud, torus_dense_matrix(basis, cloud)


@pytest.fixture(scope="session")
def medium_torus():
    """32 x 32 grid, 64 columns, eps 1e-6."""
    bf, basis, cloud = torus_factorization(32, 64, 1e-6, space_leaf_size=16, freq_leaf_size=8)
    return bf, basis, cloud, torus_dense_matrix(basis, cloud)


@pytest.fixture(scope="function")
def grid8():
    return torus_grid(8)


@pytest.fixture(scope="function")
def cloud():
    """A random point cloud inside the torus square."""
    return PointCloudFactory()
