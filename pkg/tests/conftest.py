import sys
from pathlib import Path

import numpy as np
import pytest

from diffvec import AffineLine, Ensemble, EpiExp

sys.path.insert(0, str(Path(__file__).parent))


def horizontal(h):
    return AffineLine([0.0, h], [1.0, 0.0])


@pytest.fixture
def epi_with_cycles():
    return Ensemble((horizontal(0.0), horizontal(1.0), EpiExp()))


@pytest.fixture
def epi_without_cycles():
    return Ensemble((horizontal(1.0), horizontal(0.0), EpiExp()))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
