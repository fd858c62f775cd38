"""Discrete-spectrum case: expansion in harmonic-oscillator eigenfunctions.

The operator is ``A = -sigma^2 d^2/dx^2 + ((x - x0)/sigma)^2`` with
eigenvalues ``r_n = 2n + 1`` and eigenfunctions ``u_n((x - x0)/sigma)/sqrt(sigma)``,
where ``u_n`` are the Hermite functions. ``sigma = 1, x0 = 0`` is the
textbook oscillator. The default for a given state centres the basis on the
supports and shrinks ``sigma`` so that the classically allowed region of the
highest retained level covers them; the unscaled basis converges far too
slowly for bump seeds several units away from the origin.

Eigenindex ``n`` and moment order ``m`` are kept as separate symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationBudgetError, ValidationError
from .moments import MomentReport
from .operators import HarmonicOscillator
from .quadrature import QuadratureConfig, composite_rule, quad_integrate
from .seedfn import SeedFunction, SuperposedState, unit_phase
from .tails import SAFETY, fit_stretched_exponential, stretched_tail_moment

N_MAX_CAP = 512
TRUNCATION_BUDGET = 1e-8
# classically allowed half-width of level n_max, as a multiple of the support half-extent
COVERAGE = 0.75


@dataclass(frozen=True)
class DiscreteBasis:
    n_max: int
    sigma: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ValidationError(f"n_max must be a nonnegative integer, got {self.n_max}")
        if self.n_max > N_MAX_CAP:
            raise ValidationError(
                f"n_max {self.n_max} exceeds the recurrence stability cap {N_MAX_CAP}"
            )
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")

    @property
    def eigenvalues(self) -> np.ndarray:
        return 2.0 * np.arange(self.n_max + 1) + 1.0

    @property
    def operator(self) -> HarmonicOscillator:
        return HarmonicOscillator(self.sigma, self.x0)

    def __call__(self, x) -> np.ndarray:
        """All eigenfunctions at ``x``: array of shape ``(len(x), n_max + 1)``."""
        xi = (np.atleast_1d(np.asarray(x, dtype=float)) - self.x0) / self.sigma
        return hermite_functions(xi, self.n_max) / math.sqrt(self.sigma)

    def eigenfunction(self, n: int, x) -> np.ndarray:
        return self(x)[:, n]

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "sigma": self.sigma, "x0": self.x0}


def hermite_functions(xi: np.ndarray, n_max: int) -> np.ndarray:
    """Orthonormal Hermite functions ``u_0 .. u_n_max`` by the stable three-term recurrence."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((xi.size, n_max + 1))
    out[:, 0] = math.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n_max >= 1:
        out[:, 1] = math.sqrt(2.0) * xi * out[:, 0]
    for n in range(1, n_max):
        out[:, n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[:, n] - math.sqrt(n / (n + 1)) * out[:, n - 1]
    return out


def oscillator_basis(n_max: int, sigma: float = 1.0, x0: float = 0.0) -> DiscreteBasis:
    return DiscreteBasis(int(n_max), float(sigma), float(x0))


def default_basis(state: SuperposedState, n_max: int = 256, coverage: float = COVERAGE) -> DiscreteBasis:
    """Basis centred on the supports' hull, with ``sqrt(2 n_max + 1) sigma = half_extent / coverage``."""
    lo, hi = state.hull
    half = 0.5 * (hi - lo)
    sigma = half / (coverage * math.sqrt(2 * n_max + 1))
    return oscillator_basis(n_max, sigma, 0.5 * (lo + hi))


def gram_matrix(basis: DiscreteBasis, order: int = 16) -> np.ndarray:
    """``int u_m u_n dx`` by composite Gauss-Legendre on a window that contains every retained level."""
    half = basis.sigma * (math.sqrt(2 * basis.n_max + 1) + 12.0)
    # products oscillate at up to twice the top level's local frequency
    freq = 2.0 * math.sqrt(2 * basis.n_max + 1) / basis.sigma
    n_panels = max(1, int(math.ceil(freq * 2 * half / math.pi)))
    x, w = composite_rule(np.linspace(basis.x0 - half, basis.x0 + half, n_panels + 1), order)
    u = basis(x)
    return (u * w[:, None]).T @ u


def lobe_coefficients(f: SeedFunction, basis: DiscreteBasis, cfg: QuadratureConfig | None = None):
    """``c_n = int f(x) u_n(x) dx`` over the seed's support; returns ``(coeffs, abs_error)``."""
    cfg = cfg or QuadratureConfig()
    # the top level oscillates at about sqrt(2 n_max + 1)/sigma; start with half-oscillation panels
    freq = math.sqrt(2 * basis.n_max + 1) / basis.sigma
    n_panels = max(1, int(math.ceil(freq * (f.hi - f.lo) / math.pi)))
    edges = np.linspace(f.lo, f.hi, n_panels + 1)
    res = quad_integrate(lambda x: f(x)[:, None] * basis(x), f.support, cfg, edges=edges)
    return np.asarray(res.value), res.error


@dataclass(frozen=True, eq=False)
class DiscretePMF:
    eigenvalues: np.ndarray
    probs: np.ndarray
    captured_mass: float
    beta: float
    basis: DiscreteBasis
    coeffs: np.ndarray
    coeff_error: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def missing_mass(self) -> float:
        return max(0.0, self.meta.get("norm_squared", 1.0) - self.captured_mass)


@dataclass(frozen=True, eq=False)
class LobeCoefficients:
    basis: DiscreteBasis
    c1: np.ndarray
    c2: np.ndarray
    error: float

    def combine(self, beta: float) -> np.ndarray:
        return (self.c1 + unit_phase(beta) * self.c2) / math.sqrt(2.0)


def lobe_expansion(state: SuperposedState, basis: DiscreteBasis,
                   cfg: QuadratureConfig | None = None) -> LobeCoefficients:
    c1, e1 = lobe_coefficients(state.part1, basis, cfg)
    c2, e2 = lobe_coefficients(state.part2, basis, cfg)
    return LobeCoefficients(basis, c1, c2, e1 + e2)


def expand(state: SuperposedState, basis: DiscreteBasis, *, budget: float = TRUNCATION_BUDGET,
           lobes: LobeCoefficients | None = None, cfg: QuadratureConfig | None = None) -> DiscretePMF:
    """PMF ``|c_n|^2`` with ``c_n = (c1_n + e^{i beta} c2_n)/sqrt 2`` from per-lobe coefficients."""
    lobes = lobes or lobe_expansion(state, basis, cfg)
    c = lobes.combine(state.beta)
    probs = np.abs(c) ** 2
    captured = float(probs.sum())
    target = state.norm_squared()
    if captured > target + 1e-9:
        raise TruncationBudgetError(f"captured mass {captured:.12g} exceeds the state norm {target:.12g}")
    if captured < target - budget:
        raise TruncationBudgetError(
            f"basis with n_max={basis.n_max} captures {captured:.12g}; "
            f"missing {target - captured:.3e} exceeds the budget {budget:.1e}"
        )
    return DiscretePMF(basis.eigenvalues, probs, captured, state.beta, basis, c, lobes.error,
                       {"norm_squared": target})


def _tail_shape(pmf: DiscretePMF):
    """Stretched-exponential envelope ``A exp(-a r^q)`` of the retained probabilities, or ``None``."""
    r, p = pmf.eigenvalues, pmf.probs
    n = len(p)
    if n < 24:
        return None
    width = max(4, n // 16)
    points = []
    for end in (int(0.6 * n), int(0.8 * n), n):
        block = slice(end - width, end)
        points.append((float(r[block][0]), float(p[block].max())))
    return fit_stretched_exponential(points)


def discrete_moments(pmf: DiscretePMF, m_max: int = 4) -> MomentReport:
    """``E[R^m] = sum r_n^m |c_n|^2`` and a truncation bound for the levels above ``n_max``.

    The missing mass sits at eigenvalues above ``r_max``. Its profile is
    taken from a stretched-exponential fit to the retained tail, so the
    bound is ``missing * E_fit[r^m | r > r_max]`` (times a safety factor).
    With no measurable decay, the tail is reported as infinite.
    """
    r = pmf.eigenvalues
    r_top = float(r[-1]) + 1.0
    missing = pmf.missing_mass
    shape = _tail_shape(pmf)
    values, errors, tails = [], [], []
    for m in range(m_max + 1):
        val = float(np.sum(r ** m * pmf.probs))
        if missing == 0.0:
            tail = 0.0
        elif shape is None:
            tail = math.inf
        else:
            ratio = stretched_tail_moment(*shape, r_top, m) / stretched_tail_moment(*shape, r_top, 0)
            tail = SAFETY * missing * ratio
        coeff_err = 2.0 * pmf.coeff_error * float(np.sqrt(np.sum(r ** (2 * m))))
        values.append(val)
        errors.append(tail + coeff_err + 64 * np.finfo(float).eps * abs(val))
        tails.append(tail)
    return MomentReport(m_max, np.array(values), np.array(errors), "DiscreteSum", pmf.beta, pmf.basis.operator,
                        {"truncation_bounds": tails, "captured_mass": pmf.captured_mass,
                         "tail_shape": None if shape is None else list(shape)})
