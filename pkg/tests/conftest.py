import numpy as np
import pytest

from purejump.fgn import GammaSpec
from purejump.moments import ModelParams

# Calibration used throughout the simulation studies.
PAPER_MU = 1.419188e-6
PAPER_LAM = 128.2085
PAPER_SIGMA_E = 0.0007289


def paper_params(d: float, c: float = 1.0) -> ModelParams:
    return ModelParams(PAPER_MU, PAPER_LAM, PAPER_SIGMA_E, GammaSpec(c, d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
