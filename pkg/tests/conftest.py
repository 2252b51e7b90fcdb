import numpy as np
import pytest

from arqcd.model import ARModel, FirstOrderModel, InitialStateDist


@pytest.fixture
def case1() -> FirstOrderModel:
    """The 2-d first-order benchmark model used throughout the experiments."""
    return FirstOrderModel(
        a=np.array([[0.7, 0.4], [0.2, 0.6]]),
        r=np.array([[1.0, 0.5], [0.5, 1.0]]),
    )


@pytest.fixture
def case3() -> ARModel:
    """The order-2 benchmark model."""
    return ARModel(
        coeffs=(
            np.array([[0.4, 0.3], [0.2, 0.1]]),
            np.array([[0.3, 0.2], [0.1, 0.2]]),
        ),
        innovation_cov=np.eye(2),
    )


@pytest.fixture
def scalar_a0() -> FirstOrderModel:
    """Scalar model with a = 0: post-change observations are i.i.d. N(0, 2)."""
    return FirstOrderModel(a=np.array([[0.0]]), r=np.array([[1.0]]))


def random_stable_model(rng: np.random.Generator, k: int) -> FirstOrderModel:
    """Random model with operator norm of A below 1 and well-conditioned R."""
    a = rng.normal(size=(k, k))
    a *= rng.uniform(0.1, 0.95) / max(np.linalg.norm(a, ord=2), 1e-12)
    w = rng.normal(size=(k, k))
    r = w @ w.T + 0.3 * np.eye(k)
    return FirstOrderModel(a=a, r=r)


def random_init(rng: np.random.Generator, k: int) -> InitialStateDist:
    w = rng.normal(size=(k, k))
    return InitialStateDist(mean=0.5 * rng.normal(size=k), cov=w @ w.T + 0.4 * np.eye(k))
