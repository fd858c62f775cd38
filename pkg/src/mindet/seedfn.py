"""Compactly supported seed functions and their disjoint-support superpositions.

A :class:`SeedFunction` is a Chebyshev series on its support interval that
evaluates to exactly zero outside the open support. Differentiation and
multiplication by polynomials act on the coefficients, so every differential
operator used downstream is applied exactly on the representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Chebyshev

from .errors import DerivativeBudgetError, FitError, OverlapError, ResolutionError, ValidationError

FIT_TOL = 1e-13
CHOP_TOL = 1e-15
MAX_DEGREE = 2048
MAX_DERIVATIVE_ORDER = 8
# Tail ratio allowed in a differentiated series (see tail_ratio). Chopped
# coefficients sit near 1e-15, so the ratio grows fast with order while the
# interior error stays small; 1e-2 still certifies about 1e-7 at order 8.
DERIVATIVE_TOL = 1e-2
NORM_TOL = 1e-10


def _as_interval(support) -> tuple[float, float]:
    lo, hi = (float(v) for v in support)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValidationError(f"support must be a nondegenerate interval, got [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True, eq=False)
class SeedFunction:
    """Chebyshev series on ``support`` with a hard zero outside it.

    ``coeffs`` are stored as a read-only complex array. ``norm_l2`` is the
    L2 norm over the support, computed exactly from the series on first use.
    """

    support: tuple[float, float]
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", _as_interval(self.support))
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @cached_property
    def norm_l2(self) -> float:
        return math.sqrt(max(_l2_squared(self.series()), 0.0))

    @property
    def lo(self) -> float:
        return self.support[0]

    @property
    def hi(self) -> float:
        return self.support[1]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_real(self) -> bool:
        return not np.any(self.coeffs.imag)

    def series(self) -> Chebyshev:
        return Chebyshev(self.coeffs, domain=list(self.support))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        inside = (x > self.lo) & (x < self.hi)
        if inside.any():
            out[inside] = self.series()(x[inside])
        return out if out.ndim else out[()]

    def tail_ratio(self) -> float:
        """Largest coefficient in the last eighth of the series, relative to the largest overall."""
        a = np.abs(self.coeffs)
        top = a.max()
        if top == 0.0:
            return 0.0
        n_tail = max(4, len(a) // 8)
        return float(a[-n_tail:].max() / top) if len(a) > n_tail else 0.0

    def max_abs(self, n: int = 2049) -> float:
        x = np.linspace(self.lo, self.hi, n)
        return float(np.abs(self(x)).max())

    def scaled(self, factor: complex) -> "SeedFunction":
        return SeedFunction(self.support, self.coeffs * factor)

    def to_json(self) -> dict:
        return {
            "support": [self.lo, self.hi],
            "coeffs_re": [float(v) for v in self.coeffs.real],
            "coeffs_im": [float(v) for v in self.coeffs.imag],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SeedFunction":
        re = np.asarray(obj["coeffs_re"], dtype=float)
        im = np.asarray(obj.get("coeffs_im", np.zeros_like(re)), dtype=float)
        return cls(tuple(obj["support"]), re + 1j * im)


def _l2_squared(p: Chebyshev) -> float:
    sq = p * Chebyshev(np.conj(p.coef), domain=p.domain)
    antider = sq.integ()
    lo, hi = p.domain
    return float((antider(hi) - antider(lo)).real)


def effective_support(f: SeedFunction, rel_tol: float = 1e-15) -> tuple[float, float]:
    """Shrink the support to where ``|f|`` exceeds ``rel_tol * max|f|``.

    Bumps vanish to all orders at their endpoints; this finds where the
    series value has dropped to roundoff, probing geometrically toward each
    end. Used where a kernel is singular at a support endpoint.
    """
    thr = rel_tol * f.max_abs()
    width = f.hi - f.lo
    steps = 2.0 ** -np.arange(1, 60)

    def inner_edge(points):
        vals = np.abs(f(points))
        small = vals <= thr
        # first index from which every probe closer to the edge is small
        j = len(small)
        while j > 0 and small[j - 1]:
            j -= 1
        return j

    j_lo = inner_edge(f.lo + width * steps)
    j_hi = inner_edge(f.hi - width * steps)
    lo = f.lo if j_lo >= len(steps) else f.lo + width * steps[j_lo]
    hi = f.hi if j_hi >= len(steps) else f.hi - width * steps[j_hi]
    if not lo < hi:
        return f.support
    return lo, hi


def _bump_profile(k: int):
    def profile(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        with np.errstate(over="ignore", divide="ignore", under="ignore"):
            out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** (2 * k)))
        return out

    return profile


def fit_chebyshev(func, support, *, tol: float = FIT_TOL, max_degree: int = MAX_DEGREE) -> np.ndarray:
    """Adaptively interpolate ``func`` at Chebyshev points until the tail is below ``tol``.

    Returns the chopped coefficient array on the mapped interval.
    """
    lo, hi = _as_interval(support)
    deg = 16
    while True:
        p = Chebyshev.interpolate(func, deg, domain=[lo, hi])
        c = p.coef
        top = np.abs(c).max()
        n_tail = max(8, deg // 8)
        if top == 0.0:
            return np.zeros(1)
        if np.abs(c[-n_tail:]).max() <= tol * top:
            keep = np.nonzero(np.abs(c) > CHOP_TOL * top)[0]
            return c[: keep[-1] + 1]
        if deg >= max_degree:
            raise FitError(
                f"Chebyshev tail {np.abs(c[-n_tail:]).max() / top:.2e} above {tol:.1e} "
                f"at maximum degree {max_degree}"
            )
        deg = min(2 * deg, max_degree)


def make_bump(k: int = 1, support=(0.0, 1.0), *, tol: float = FIT_TOL,
              max_degree: int = MAX_DEGREE) -> SeedFunction:
    """Unit-norm bump ``c * exp(-1/(1 - t**(2k)))`` with ``t`` the affine image of ``support`` on (-1, 1)."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValidationError(f"bump exponent k must be a positive integer, got {k!r}")
    lo, hi = _as_interval(support)
    profile = _bump_profile(int(k))
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    coeffs = fit_chebyshev(lambda x: profile((x - mid) / half), (lo, hi), tol=tol, max_degree=max_degree)
    raw = SeedFunction((lo, hi), coeffs)
    return raw.scaled(1.0 / raw.norm_l2)


def shift_scale(f: SeedFunction, alpha: float = 1.0, D: float = 0.0) -> SeedFunction:
    """Return ``x -> sqrt(alpha) * f(alpha * (x - D))``.

    The Chebyshev coefficients carry over unchanged onto the image interval
    ``[D + lo/alpha, D + hi/alpha]``; only the prefactor changes, so the L2
    norm is preserved exactly.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    support = (D + f.lo / alpha, D + f.hi / alpha)
    return SeedFunction(support, f.coeffs * math.sqrt(alpha))


def overlap_measure(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, min(a[1], b[1]) - max(a[0], b[0]))


@dataclass(frozen=True, eq=False)
class SuperposedState:
    """``psi(x) = (part1(x) + exp(i beta) part2(x)) / sqrt(2)``.

    Constructing the dataclass directly performs no checks; use
    :func:`superpose` for a validated state.
    """

    part1: SeedFunction
    part2: SeedFunction
    beta: float = 0.0

    def __call__(self, x):
        return eval_state(self, x)

    def with_beta(self, beta: float) -> "SuperposedState":
        return SuperposedState(self.part1, self.part2, float(beta))

    @property
    def parts(self) -> tuple[SeedFunction, SeedFunction]:
        return self.part1, self.part2

    @property
    def hull(self) -> tuple[float, float]:
        return min(self.part1.lo, self.part2.lo), max(self.part1.hi, self.part2.hi)

    def norm_squared(self) -> float:
        # cross terms vanish on disjoint supports
        return 0.5 * (self.part1.norm_l2 ** 2 + self.part2.norm_l2 ** 2)


def superpose(part1: SeedFunction, part2: SeedFunction, beta: float = 0.0) -> SuperposedState:
    for name, part in (("part1", part1), ("part2", part2)):
        if abs(part.norm_l2 - 1.0) > NORM_TOL:
            raise ValidationError(f"{name} is not unit normalized (norm {part.norm_l2:.15g})")
    ov = overlap_measure(part1.support, part2.support)
    if ov > 0.0:
        raise OverlapError(
            f"supports {list(part1.support)} and {list(part2.support)} overlap on a set of measure {ov:.6g}",
            ov,
        )
    return SuperposedState(part1, part2, float(beta))


def differentiate(f: SeedFunction, order: int = 1, *, max_order: int = MAX_DERIVATIVE_ORDER,
                  tol: float = DERIVATIVE_TOL) -> SeedFunction:
    """Spectral derivative of ``f`` on the same support."""
    if order < 0:
        raise ValidationError("derivative order must be nonnegative")
    if order > max_order:
        raise DerivativeBudgetError(f"derivative order {order} exceeds the configured maximum {max_order}")
    if order == 0:
        return f
    d = SeedFunction(f.support, f.series().deriv(order).coef)
    check_resolved(d, tol, what=f"derivative of order {order}")
    return d


def check_resolved(f: SeedFunction, tol: float = DERIVATIVE_TOL, *, what: str = "series") -> None:
    ratio = f.tail_ratio()
    if ratio > tol:
        raise ResolutionError(f"{what} is under-resolved: tail ratio {ratio:.2e} exceeds {tol:.1e}")


def unit_phase(beta: float) -> complex:
    """``exp(i beta)`` evaluated on the angle reduced to (-pi, pi], so beta = pi and -pi agree bitwise."""
    r = math.fmod(float(beta), 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    elif r > math.pi:
        r -= 2 * math.pi
    return complex(math.cos(r), math.sin(r))


def eval_state(state: SuperposedState, x):
    phase = unit_phase(state.beta)
    return (state.part1(x) + phase * state.part2(x)) / math.sqrt(2.0)


def default_pair(k: int = 1, width: float = 1.0, shift: float = 3.0, alpha: float = 1.0,
                 offset: float = 0.0) -> tuple[SeedFunction, SeedFunction]:
    """Bump on ``[offset, offset + width]`` and its copy moved by ``shift`` (and rescaled by ``alpha``)."""
    psi1 = make_bump(k, (offset, offset + width))
    return psi1, shift_scale(psi1, alpha, shift)
