import math

import numpy as np
import pytest

from snowflakecli.cavtun.physics import DoubleWellSpec, make_params, solve_double_well

QUARTER = math.pi / 4.0


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def resonant_params():
    """Delta/g = 2, resonant field, kappa = pi/4."""
    return make_params(g=1.0, delta=0.0, tunnel_split=2.0, kappa=QUARTER, chi=-QUARTER)


@pytest.fixture
def quasiperiodic_params():
    """Delta = delta = g, kappa = pi/4."""
    return make_params(g=1.0, delta=1.0, tunnel_split=1.0, kappa=QUARTER, chi=-QUARTER)


@pytest.fixture(scope="session")
def reference_well():
    """V(x) = 0.08 x^4 - x^2 with hbar = m = 1, solved once per session."""
    return solve_double_well(DoubleWellSpec())


def random_state_amplitudes(rng: np.random.Generator, sectors: int) -> tuple:
    ground = rng.normal(size=2) + 1j * rng.normal(size=2)
    amplitudes = rng.normal(size=(sectors, 4)) + 1j * rng.normal(size=(sectors, 4))
    norm = math.sqrt(np.sum(np.abs(ground) ** 2) + np.sum(np.abs(amplitudes) ** 2))
    return ground / norm, amplitudes / norm


@pytest.fixture
def random_state(rng):
    from snowflakecli.cavtun.physics import CompositeState

    def build(sectors: int = 4) -> CompositeState:
        ground, amplitudes = random_state_amplitudes(rng, sectors)
        return CompositeState(ground=ground, sectors=amplitudes)

    return build
