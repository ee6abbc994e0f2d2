import pathlib

import numpy as np
import pytest

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def samples_dir():
    return SAMPLES
