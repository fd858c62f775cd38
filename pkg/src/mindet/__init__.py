"""Moment-indeterminate densities from disjoint-support superpositions.

Seeds with disjoint compact supports are superposed with a relative phase
``beta`` and pushed through the eigen-transform of a self-adjoint operator.
The resulting densities ``|F(r)|^2`` change with ``beta`` while every moment
stays fixed. The package builds those densities and checks both claims by
independent numerical routes.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    MIndetError,
    NumericalBudgetError,
    OverlapError,
    TailBudgetError,
    TruncationBudgetError,
    ValidationError,
)
from .operators import (
    CONTINUOUS_OPERATORS,
    ConstantForce,
    HarmonicOscillator,
    Momentum,
    PositionPlusMomentum,
    Scale,
    operator_from_name,
)
from .seedfn import SeedFunction, SuperposedState, default_pair, make_bump, shift_scale, superpose
from .xform import RGrid, SampledDensity, default_grid, density, l1_distance, lobe_transforms, transform
from .moments import (
    MomentReport,
    Tolerances,
    VerificationReport,
    cross_term,
    moments_operator_path,
    moments_r_domain,
    verify_m_indeterminate,
)
from .discrete import DiscreteBasis, DiscretePMF, default_basis, discrete_moments, expand, oscillator_basis
from .reference import HeydeParams, heyde_density, heyde_moment_numeric, heyde_table, lognormal_density
from .config import RunConfig

__all__ = [name for name in dir() if not name.startswith("_")]
