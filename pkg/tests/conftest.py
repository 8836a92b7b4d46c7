"""Shared pytest fixtures for the benchmark suite."""

import numpy as np
import pytest

from synthetic import make_textured_rgb


@pytest.fixture(scope="session")
def textured_image() -> np.ndarray:
    return make_textured_rgb()


@pytest.fixture(scope="session")
def params():
    from endobench import default_params
    return default_params()
