import math
import pathlib

import numpy as np
import pytest

import helpers
from gibbsdim import AffineIfs

MODELS = pathlib.Path(__file__).resolve().parent.parent / "models"


@pytest.fixture
def full2():
    return helpers.full2()


@pytest.fixture
def gold():
    return helpers.gold()


@pytest.fixture
def bin14():
    return helpers.bin14()


@pytest.fixture
def phi_pm():
    return helpers.phi_pm()


@pytest.fixture
def phi_neg():
    return helpers.phi_neg()


@pytest.fixture
def ifs_bin(full2):
    return AffineIfs(spec=full2, interval=(0.0, 1.0),
                     rates=np.array([0.5, 0.5]), offsets=np.array([0.0, 0.5]))


@pytest.fixture
def models_dir():
    return MODELS
