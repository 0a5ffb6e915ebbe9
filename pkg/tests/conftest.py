import numpy as np
import pytest

from resdens import InnovationSpec, ModelSpec, RngStream, ThetaVector
from resdens import ARMA, ARMA_GARCH, GARCH, GAUSSIAN, STD_STUDENT_T, STUDENT_T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_model(rng):
    """Random valid (spec, theta) from one of the three families."""
    family = rng.choice([ARMA, GARCH, ARMA_GARCH])
    innov = InnovationSpec(GAUSSIAN)
    if rng.random() < 0.5:
        innov = InnovationSpec(STD_STUDENT_T, float(rng.uniform(4.0, 12.0)))
    eta = float(rng.uniform(-1.0, 1.0))
    ar, ma, alpha, beta = [], [], [1.0], []
    if family in (ARMA, ARMA_GARCH):
        ar = [float(rng.uniform(-0.8, 0.8))]
        if rng.random() < 0.4:
            ma = [float(rng.uniform(-0.7, 0.7))]
    if family in (GARCH, ARMA_GARCH):
        a1 = float(rng.uniform(0.03, 0.2))
        b1 = float(rng.uniform(0.3, 0.9 - a1))
        alpha = [float(rng.uniform(0.05, 0.5)), a1]
        beta = [b1]
    spec = ModelSpec(family, p=len(ar), q=len(ma), garch_p=len(beta),
                     garch_q=len(alpha) - 1, innovation=innov)
    theta = ThetaVector(eta=eta, ar=ar, ma=ma, alpha=alpha, beta=beta)
    return spec, theta


def stream(seed, sid=0):
    return RngStream(seed, sid)
