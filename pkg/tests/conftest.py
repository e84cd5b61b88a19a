"""Shared fixtures."""
import numpy as np
import pytest

from app.yb_catalog import Kind, ModeWindow

ALL_KINDS = [k.value for k in Kind]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def window3():
    return ModeWindow(0, 2)


@pytest.fixture
def window2():
    return ModeWindow(0, 1)
