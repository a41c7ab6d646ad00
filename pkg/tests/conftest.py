import numpy as np
import pytest

from tomo2q.projectors import inseparable_projector_set, local_projector_set
from tomo2q.states import CholeskyModel, RANK_NPARAMS


@pytest.fixture(scope="session")
def local_set():
    return local_projector_set()


@pytest.fixture(scope="session")
def insep_set():
    return inseparable_projector_set()


def random_model(rank, rng, lam=1.0):
    """Random interior Cholesky model at the requested scale."""
    theta = rng.standard_normal(RANK_NPARAMS[rank])
    theta *= np.sqrt(lam / np.dot(theta, theta))
    return CholeskyModel(rank=rank, params=theta)
