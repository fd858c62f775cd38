import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mindet.operators import CONTINUOUS_OPERATORS, operator_from_name
from mindet.seedfn import default_pair, make_bump, superpose
from mindet.xform import default_grid, lobe_transforms

BETA_SWEEP = (-math.pi, -math.pi / 2, 0.0, math.pi / 2, math.pi)
DEFAULT_BETAS = (0.0, math.pi / 2, math.pi)


@pytest.fixture(scope="session")
def pair():
    return default_pair()


@pytest.fixture(scope="session")
def psi1(pair):
    return pair[0]


@pytest.fixture(scope="session")
def state0(pair):
    return superpose(*pair, 0.0)


@pytest.fixture(scope="session")
def bump_m11():
    return make_bump(1, (-1.0, 1.0))


@pytest.fixture(scope="session")
def operators():
    return {name: operator_from_name(name) for name in CONTINUOUS_OPERATORS}


@pytest.fixture(scope="session")
def lobes(state0, operators):
    """Per-operator lobe transforms of the default pair on the default grids."""
    return {name: lobe_transforms(state0, op, default_grid(op)) for name, op in operators.items()}


@pytest.fixture(scope="session")
def discrete_setup(state0):
    from mindet.discrete import default_basis, lobe_expansion

    basis = default_basis(state0, 256)
    return basis, lobe_expansion(state0, basis)
