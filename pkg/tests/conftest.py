import numpy as np
import pytest

from arfade import ARParams


@pytest.fixture(scope="session")
def jakes():
    """Near-unit-root AR(2) used by the shipped experiments."""
    return ARParams(np.array([1.8, -0.9]))


@pytest.fixture(scope="session")
def moderate():
    """Comfortably stationary AR(2) (poles 0.5 e^{+-i pi/3}) for scaling-law
    checks that need the estimators in their asymptotic regime."""
    return ARParams(np.array([0.5, -0.25]))


def random_stationary_params(rng: np.random.Generator, order: int, max_pole: float = 0.95) -> ARParams:
    """Random real-coefficient stationary AR(p) from random pole placement."""
    poles = []
    remaining = order
    while remaining > 0:
        if remaining >= 2 and rng.random() < 0.6:
            radius = max_pole * rng.random() ** 0.5
            angle = rng.uniform(0.1, np.pi - 0.1)
            poles += [radius * np.exp(1j * angle), radius * np.exp(-1j * angle)]
            remaining -= 2
        else:
            poles.append(complex(rng.uniform(-max_pole, max_pole)))
            remaining -= 1
    # z^p - a1 z^{p-1} - ... - ap has these roots
    monic = np.poly(np.array(poles))
    return ARParams(np.real(-monic[1:]))
