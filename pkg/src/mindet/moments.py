"""Moments ``E[R^n]`` by two independent routes, and the indeterminacy check.

Operator route: ``E[R^n] = <A^j psi, A^(n-j) psi>`` with ``j = n // 2``. The
operators are differential with polynomial coefficients, so on every
interval between support breakpoints the integrand is a polynomial and a
Gauss-Legendre rule with enough nodes integrates it exactly. The split
keeps the derivative order at ``ceil(n/2)`` instead of ``n``.

r-domain route: trapezoid sums of ``r^n P(r)`` on the sampled density,
with an error bound built from a step-halving difference, the propagated
amplitude error and an edge-extrapolated tail (see :mod:`mindet.tails`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DerivativeBudgetError, SelfAdjointnessError, ValidationError
from .operators import Operator, Scale
from .quadrature import QuadratureConfig
from .seedfn import MAX_DERIVATIVE_ORDER, SeedFunction, SuperposedState, superpose, unit_phase
from .tails import tail_moment_bound

_EPS = np.finfo(float).eps
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    moments: float = 1e-8
    cross: float = 1e-12
    density: float = 0.05

    def to_dict(self) -> dict:
        return {"moments": self.moments, "cross": self.cross, "density": self.density}


@dataclass(frozen=True, eq=False)
class MomentReport:
    n_max: int
    moments: np.ndarray
    abs_error_estimates: np.ndarray
    path: str
    beta: float
    operator: Operator
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "path": self.path,
            "beta": self.beta,
            "operator": self.operator.to_dict(),
            "moments": [float(v) for v in self.moments],
            "abs_error_estimates": [float(v) for v in self.abs_error_estimates],
            **({"meta": self.meta} if self.meta else {}),
        }


OPERATOR_PATH = "OperatorExpectation"
R_DOMAIN_PATH = "RDomain"


def apply_operator(op: Operator, f: SeedFunction) -> SeedFunction:
    return op.apply(f)


def _check_budget(op: Operator, n: int) -> None:
    if n < 0:
        raise ValidationError("moment order must be nonnegative")
    need = op.order * (n - n // 2)
    if need > MAX_DERIVATIVE_ORDER:
        raise DerivativeBudgetError(
            f"moment order {n} needs derivatives of order {need}, above the budget {MAX_DERIVATIVE_ORDER}"
        )


_CHOPPED: dict = {}


def _chop_tail(f: SeedFunction) -> SeedFunction:
    """``f`` without the trailing eighth of its coefficients (cached per seed object)."""
    hit = _CHOPPED.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1]
    n = len(f.coeffs)
    keep = n - max(1, n // 8)
    g = SeedFunction(f.support, f.coeffs[:max(keep, 1)])
    if len(_CHOPPED) > 64:
        _CHOPPED.pop(next(iter(_CHOPPED)))
    _CHOPPED[id(f)] = (f, g)
    return g


class _Powers:
    """``A^k f`` for increasing ``k``, computed lazily and shared."""

    def __init__(self, op: Operator, f: SeedFunction):
        self.op = op
        self.items = [f]

    def __getitem__(self, k: int) -> SeedFunction:
        while len(self.items) <= k:
            self.items.append(self.op.apply(self.items[-1]))
        return self.items[k]


_POWERS: dict = {}


def _powers(op: Operator, f: SeedFunction) -> _Powers:
    key = (id(f), op)
    hit = _POWERS.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if len(_POWERS) > 64:
        _POWERS.pop(next(iter(_POWERS)))
    p = _Powers(op, f)
    _POWERS[key] = (f, p)
    return p


@lru_cache(maxsize=64)
def _gl(m: int):
    return np.polynomial.legendre.leggauss(m)


def _pieces(parts) -> list[tuple[float, float]]:
    lo = min(p.lo for p in parts)
    hi = max(p.hi for p in parts)
    breaks = sorted({lo, hi, *(v for p in parts for v in p.support)})
    return list(zip(breaks[:-1], breaks[1:]))


def _exact_inner(left: list[tuple[complex, SeedFunction]], right: list[tuple[complex, SeedFunction]]):
    """``int conj(sum a_i g_i) (sum b_k h_k) dx`` and the matching integral of absolute values.

    Each linear combination is evaluated as a whole on every piece between
    support breakpoints, with a rule exact for the polynomial degree involved.
    """
    parts = [g for _, g in left] + [h for _, h in right]
    deg = max(len(g.coeffs) for _, g in left) + max(len(h.coeffs) for _, h in right)
    m = deg // 2 + 2
    xg, wg = _gl(m)
    total, absint = 0.0 + 0.0j, 0.0
    for a, b in _pieces(parts):
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        x = mid + half * xg
        u = sum(c * g(x) for c, g in left)
        v = sum(c * h(x) for c, h in right)
        prod = np.conj(u) * v
        total += half * np.dot(wg, prod)
        absint += half * np.dot(wg, np.abs(prod))
    return complex(total), float(absint)


def _state_expectation(state: SuperposedState, op: Operator, n: int, chop: bool = False):
    j = n // 2
    phase = unit_phase(state.beta) / math.sqrt(2.0)
    lobes = [_powers(op, _chop_tail(p) if chop else p) for p in state.parts]
    c = [1.0 / math.sqrt(2.0), phase]
    left = [(c[i], lobes[i][j]) for i in range(2)]
    right = [(c[i], lobes[i][n - j]) for i in range(2)]
    return _exact_inner(left, right)


def _check_state(state: SuperposedState, op: Operator) -> None:
    for part in state.parts:
        op.check_support(part.support)


def moments_operator_path(state: SuperposedState, op: Operator, n_max: int = 6) -> MomentReport:
    """``E[R^n] = int conj(psi) A^n psi dx`` for ``n = 0..n_max``.

    The error estimate is the roundoff floor plus the change in the moment
    when the trailing eighth of each seed's Chebyshev coefficients is
    dropped, a direct measure of how much the unresolved part of the series
    matters after differentiation.
    """
    _check_state(state, op)
    _check_budget(op, n_max)
    values, errors, residues = [], [], []
    for n in range(n_max + 1):
        val, absint = _state_expectation(state, op, n)
        # relative to the integral of |integrand|: odd moments can be 0 while the integrand is huge
        scale = max(1.0, absint)
        if abs(val.imag) > IMAG_TOL * scale:
            raise SelfAdjointnessError(
                f"<psi, A^{n} psi> has imaginary part {val.imag:.3e} (real part {val.real:.6g})"
            )
        chopped, _ = _state_expectation(state, op, n, chop=True)
        values.append(val.real)
        errors.append(64 * _EPS * absint + abs(chopped.real - val.real))
        residues.append(abs(val.imag) / scale)
    return MomentReport(n_max, np.array(values), np.array(errors), OPERATOR_PATH, state.beta, op,
                        {"imag_residue_max": float(max(residues))})


def cross_term(state: SuperposedState, op: Operator, n: int) -> complex:
    """``int conj(psi1) A^n psi2 dx``, evaluated as ``<A^j psi1, A^(n-j) psi2>`` with ``j = n // 2``.

    For compactly supported smooth seeds the two forms agree (no boundary
    terms); the split keeps the derivative order low.
    """
    _check_budget(op, n)
    j = n // 2
    p1, p2 = _powers(op, state.part1), _powers(op, state.part2)
    val, _ = _exact_inner([(1.0, p1[j])], [(1.0, p2[n - j])])
    return val


def moments_r_domain(dens, n_max: int = 4, *, tail_budget: float = 1e-5) -> MomentReport:
    """Trapezoid moments ``sum h r^n P(r)`` with error estimates.

    Raises ``TailBudgetError`` when the tail contribution for some ``n``
    exceeds ``tail_budget * (1 + E[|R|^n])``. The absolute moment is the
    scale: the tail bounds an integral of ``|r|^n`` and odd signed moments
    may vanish.
    """
    from .errors import TailBudgetError

    grid = dens.grid
    r = grid.values
    p = dens.values
    h = grid.spacing
    amp = math.sqrt(2.0) * dens.amplitude_error
    f_abs = np.sqrt(p)
    tails = tail_moment_bound(grid, p, n_max, deficit=dens.tail_mass_estimate)
    values, errors, meta_tails = [], [], []
    for n in range(n_max + 1):
        w = r ** n
        full = float(grid.trapezoid(w * p))
        coarse_p = (w * p)[::2]
        coarse = 2 * h * float(coarse_p.sum() - 0.5 * (coarse_p[0] + coarse_p[-1]))
        disc = abs(full - coarse)
        propagated = h * float(np.sum(np.abs(w) * (2 * f_abs * amp + amp * amp)))
        roundoff = 64 * _EPS * h * float(np.sum(np.abs(w) * p)) * math.sqrt(len(r))
        tail = tails[n]
        abs_moment = float(grid.trapezoid(np.abs(w) * p))
        if tail > tail_budget * (1.0 + abs_moment):
            raise TailBudgetError(
                f"r-domain moment n={n}: tail estimate {tail:.3e} exceeds budget "
                f"{tail_budget:.1e} x (1 + |E|) on grid [{grid.r_min:g}, {grid.r_max:g}]"
            )
        values.append(full)
        errors.append(disc + propagated + roundoff + tail)
        meta_tails.append(tail)
    return MomentReport(n_max, np.array(values), np.array(errors), R_DOMAIN_PATH, dens.beta, dens.operator,
                        {"tail_estimates": meta_tails, "grid": grid.to_dict()})


def scale_cross_integral(f1: SeedFunction, D: float, n: int, grid=None, cfg: QuadratureConfig | None = None):
    """The scale-operator cross integral ``I`` of a pure-shift pair, directly in the r-domain.

    ``I = int r^n M1(r) conj(M2(r)) dr`` where ``M1(r) = int x^{-1/2} e^{-i r ln x} psi1(x) dx`` and
    ``M2`` is the same for ``psi1(x - D)``. In terms of the normalized
    transforms this is ``2 pi int r^n F1 conj(F2) dr``, evaluated by the trapezoid rule.
    """
    from .seedfn import shift_scale
    from .xform import _cached_seed_transform, default_grid

    op = Scale()
    grid = grid or default_grid(op)
    cfg = cfg or QuadratureConfig()
    f2 = shift_scale(f1, 1.0, D)
    F1, e1 = _cached_seed_transform(f1, op, grid, cfg)
    F2, e2 = _cached_seed_transform(f2, op, grid, cfg)
    r = grid.values
    return complex(2 * math.pi * grid.trapezoid(r ** n * F1 * np.conj(F2)))


@dataclass(frozen=True, eq=False)
class VerificationReport:
    operator: Operator
    betas: list
    n_max: int
    max_moment_spread: np.ndarray
    relative_moment_spread: np.ndarray
    density_l1_spread: float
    pairwise_l1: dict
    cross_term_max: float
    verdict: bool
    reasons: list
    moments: np.ndarray
    tolerances: Tolerances
    mass_errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator.to_dict(),
            "betas": [float(b) for b in self.betas],
            "n_max": self.n_max,
            "max_moment_spread": [float(v) for v in self.max_moment_spread],
            "relative_moment_spread": [float(v) for v in self.relative_moment_spread],
            "density_l1_spread": float(self.density_l1_spread),
            "pairwise_l1": {k: float(v) for k, v in self.pairwise_l1.items()},
            "cross_term_max": float(self.cross_term_max),
            "moments": [float(v) for v in self.moments],
            "mass_errors": [float(v) for v in self.mass_errors],
            "tolerances": self.tolerances.to_dict(),
            "verdict": "pass" if self.verdict else "fail",
            "reasons": list(self.reasons),
        }


def verify_m_indeterminate(part1: SeedFunction, part2: SeedFunction, op: Operator, betas,
                           n_max: int = 6, tolerances: Tolerances | None = None, *,
                           grid=None, cfg: QuadratureConfig | None = None) -> VerificationReport:
    """Check that the moments do not depend on ``beta`` while the densities do."""
    from .xform import l1_distance, lobe_transforms

    tol = tolerances or Tolerances()
    betas = [float(b) for b in betas]
    if len(betas) < 2:
        raise ValidationError("verification needs at least two betas")
    states = [superpose(part1, part2, b) for b in betas]
    table = np.array([moments_operator_path(s, op, n_max).moments for s in states])
    spread = table.max(axis=0) - table.min(axis=0)
    scale = 1.0 + np.abs(table).max(axis=0)
    rel = spread / scale

    lobes = lobe_transforms(states[0], op, grid, cfg)
    dens = [lobes.density(b) for b in betas]
    pairwise = {}
    for (i, a), (k, b) in itertools.combinations(enumerate(dens), 2):
        pairwise[f"{betas[i]:.6g}|{betas[k]:.6g}"] = l1_distance(a, b)
    l1_min = min(pairwise.values())
    cross = max(abs(cross_term(states[0], op, n)) for n in range(n_max + 1))
    mass_err = [abs(d.total_mass - 1.0) for d in dens]

    reasons = []
    if not np.all(rel < tol.moments):
        worst = int(np.argmax(rel))
        reasons.append(f"moment spread {rel[worst]:.3e} at n={worst} not below {tol.moments:.1e}")
    if not l1_min >= tol.density:
        reasons.append(f"indistinguishable densities: min pairwise L1 {l1_min:.3e} below {tol.density:.3g}")
    if not cross < tol.cross:
        reasons.append(f"cross term {cross:.3e} not below {tol.cross:.1e}")
    return VerificationReport(op, betas, n_max, spread, rel, l1_min, pairwise, cross, not reasons,
                              reasons, table[0], tol, mass_err)
