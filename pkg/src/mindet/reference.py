"""Classical reference cases: the log-normal density and Heyde's perturbed family,
plus the Stieltjes-class reading of the pure-shift momentum density.

Heyde's densities ``P_LN(x) (1 + eps sin(2 pi k ln x))`` share every moment
``e^{n^2/2}`` with the log-normal. The moments are integrated numerically
after ``x = e^t``, which turns the integrand into ``e^{n t}`` times a
Gaussian times a bounded factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError, ValidationError
from .operators import Momentum, Operator, PositionPlusMomentum
from .quadrature import QuadratureConfig, composite_rule, quad_integrate
from .seedfn import SuperposedState
from .tails import tail_moment_bound

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
HEYDE_MAX_ORDER = 8
# integration window in t = ln x is [-T_PAD, n + T_PAD]
T_PAD = 12.0


@dataclass(frozen=True)
class HeydeParams:
    epsilon: float = 1.0
    k: int = 1

    def __post_init__(self):
        eps = float(self.epsilon)
        if not abs(eps) <= 1.0:
            raise ValidationError(f"Heyde epsilon must lie in [-1, 1], got {self.epsilon}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"Heyde k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "k", int(self.k))


def _positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("log-normal densities are defined for x > 0 only")
    return x


def lognormal_density(x):
    x = _positive(x)
    lx = np.log(x)
    out = _INV_SQRT_2PI / x * np.exp(-0.5 * lx * lx)
    return out if out.ndim else float(out)


def heyde_density(x, p: HeydeParams):
    x = _positive(x)
    out = lognormal_density(x) * (1.0 + p.epsilon * np.sin(2 * math.pi * p.k * np.log(x)))
    return out if np.ndim(out) else float(out)


def lognormal_moment(n: int) -> float:
    return math.exp(0.5 * n * n)


def heyde_moment_numeric(n: int, p: HeydeParams, cfg: QuadratureConfig | None = None) -> float:
    """``int_0^inf x^n heyde_density(x) dx`` as ``int e^{(n+1) t} heyde_density(e^t) dt``.

    The integrand is formed directly (no completed square), peaks near
    ``t = n`` and is integrated over ``[-12, n + 12]``; the tolerance is
    relative to the integrand's peak.
    """
    if int(n) != n or n < 0:
        raise ValidationError(f"moment order must be a nonnegative integer, got {n}")
    if n > HEYDE_MAX_ORDER:
        raise ValidationError(f"Heyde moment order {n} exceeds the growth budget {HEYDE_MAX_ORDER}")
    base = cfg or QuadratureConfig()

    def integrand(t):
        return np.exp((n + 1) * t) * heyde_density(np.exp(t), p)

    a, b = -T_PAD, n + T_PAD
    peak = float(np.abs(integrand(np.linspace(a, b, 2049))).max())
    cfg = QuadratureConfig(tol=base.tol * peak, order=base.order, max_subdivisions=base.max_subdivisions)
    # about ten panels per oscillation of the sine factor
    n_panels = int(math.ceil(10 * p.k * (b - a)))
    return float(quad_integrate(integrand, (a, b), cfg, edges=np.linspace(a, b, n_panels + 1)).value)


def lognormal_integral(cfg: QuadratureConfig | None = None) -> float:
    """``int_0^inf P_LN(x) dx`` through ``x = e^t``."""
    res = quad_integrate(lambda t: np.exp(t) * lognormal_density(np.exp(t)), (-T_PAD, T_PAD), cfg,
                         edges=np.linspace(-T_PAD, T_PAD, 49))
    return float(res.value)


def heyde_l1_distance(a: HeydeParams, b: HeydeParams, n_points: int = 48001) -> float:
    """``int |P_a - P_b| dx`` on a uniform grid in ``t = ln x`` (trapezoid rule)."""
    t = np.linspace(-T_PAD, T_PAD, n_points)
    x = np.exp(t)
    y = np.abs(heyde_density(x, a) - heyde_density(x, b)) * x
    h = t[1] - t[0]
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def heyde_table(n_max: int = 4, epsilons=(-1.0, -0.5, 0.0, 0.5, 1.0), ks=(1, 2)) -> list[dict]:
    rows = []
    for k in ks:
        for eps in epsilons:
            p = HeydeParams(eps, k)
            for n in range(n_max + 1):
                num = heyde_moment_numeric(n, p)
                exact = lognormal_moment(n)
                rows.append({"n": n, "epsilon": eps, "k": k, "numeric": num, "exact": exact,
                             "rel_error": abs(num - exact) / exact})
    return rows


@dataclass(frozen=True, eq=False)
class StieltjesForm:
    """``P_eps(r) = P(r) (1 + eps h(r))`` sampled on a grid."""

    grid: object
    base: np.ndarray
    h: np.ndarray
    epsilon: float
    D: float
    beta: float

    def __post_init__(self):
        if np.any(np.abs(self.h) > 1 + 1e-12):
            raise ValidationError("perturbation function exceeds 1 in magnitude")
        if np.any(self.density_values() < -1e-12):
            raise ValidationError("Stieltjes density is negative")

    def density_values(self) -> np.ndarray:
        return self.base * (1.0 + self.epsilon * self.h)

    def perturbation(self, r) -> np.ndarray:
        return np.cos(np.asarray(r, dtype=float) * self.D - self.beta)


def _momentum_like(op: Operator) -> bool:
    if isinstance(op, Momentum):
        return True
    if isinstance(op, PositionPlusMomentum):
        if op.c != 0.0:
            raise ShapeError(
                "the chirped density with c != 0 has no Stieltjes form: the shifted lobe's "
                "transform is F1(r - cD), not a phase multiple of F1(r)"
            )
        return True
    return False


def extract_stieltjes_form(state: SuperposedState, op: Operator | None = None, grid=None,
                           cfg: QuadratureConfig | None = None) -> StieltjesForm:
    """Read the pure-shift momentum density as ``|F1|^2 (1 + cos(r D - beta))``."""
    from .xform import default_grid, pure_shift, seed_transform

    op = op or Momentum()
    if not _momentum_like(op):
        raise ShapeError(f"Stieltjes form extraction needs the momentum operator, got {op.name}")
    D = pure_shift(state)
    if D is None:
        raise ShapeError("Stieltjes form extraction needs a pure-shift pair, part2(x) = part1(x - D)")
    grid = grid or default_grid(Momentum())
    f1, _ = seed_transform(state.part1, Momentum(), grid, cfg)
    r = grid.values
    return StieltjesForm(grid, np.abs(f1) ** 2, np.cos(r * D - state.beta), 1.0, D, state.beta)


def vanishing_moments(form: StieltjesForm, n_max: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """``int r^n P(r) h(r) dr`` for ``n = 0..n_max`` with error estimates (trapezoid plus tail)."""
    grid = form.grid
    r = grid.values
    ph = form.base * form.h
    tails = tail_moment_bound(grid, form.base, n_max)
    vals, errs = [], []
    for n in range(n_max + 1):
        w = r ** n * ph
        full = float(grid.trapezoid(w))
        coarse_w = w[::2]
        coarse = 2 * grid.spacing * float(coarse_w.sum() - 0.5 * (coarse_w[0] + coarse_w[-1]))
        roundoff = 64 * np.finfo(float).eps * grid.spacing * float(np.sum(np.abs(r) ** n * form.base))
        vals.append(full)
        errs.append(abs(full - coarse) + roundoff + tails[n])
    return np.array(vals), np.array(errs)
