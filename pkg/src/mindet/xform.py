"""r-transforms ``F(r) = int psi(x) conj(u(r, x)) dx`` and densities ``P(r) = |F(r)|**2``.

Each seed lobe is transformed once per (operator, grid). The quadrature rule
is built adaptively: panels first follow the kernel's phase so that none
spans more than half an oscillation at the largest ``|r|`` on the grid, then
they are refined until a probe set of ``r`` values converges. The converged
rule is applied to every grid point through a blocked non-uniform DFT: rows
are grouped in blocks of 64 consecutive ``r`` values that share one base
matrix ``exp(-i k h phase(x))``, so the bulk of the work is a single complex
matrix product per node chunk.

States with a phase ``beta`` combine the cached lobe transforms linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ShapeError, ValidationError
from .operators import Momentum, Operator, Scale
from .quadrature import QuadratureConfig, composite_rule, panels_from_measure, quad_integrate
from .seedfn import SeedFunction, SuperposedState, effective_support, unit_phase

_EPS = np.finfo(float).eps
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
DFT_BLOCK = 64
DFT_CHUNK = 4096
N_PROBES = 17
# roundoff allowance per node in the error bound of a transform value
_ROUNDOFF = 64 * _EPS


@dataclass(frozen=True)
class RGrid:
    """Uniform grid ``r_min, r_min + h, ..., r_max`` with ``n_points`` points."""

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.r_min) and math.isfinite(self.r_max)) or not self.r_min < self.r_max:
            raise ValidationError(f"grid needs r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValidationError(f"grid needs at least 2 points, got {self.n_points}")
        object.__setattr__(self, "r_min", float(self.r_min))
        object.__setattr__(self, "r_max", float(self.r_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_points)

    @property
    def r_abs_max(self) -> float:
        return max(abs(self.r_min), abs(self.r_max))

    def trapezoid(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y)
        return self.spacing * (y.sum(axis=0) - 0.5 * (y[0] + y[-1]))

    def to_dict(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max, "n_points": self.n_points}


# Wide enough that the Parseval deficit of the default seeds is at roundoff
# level; the Scale grid is coarser because the compressed lobe near x = D has
# a correspondingly wider r-spread.
_DEFAULT_GRIDS = {
    "momentum": RGrid(-400.0, 400.0, 8001),
    "position_plus_momentum": RGrid(-400.0, 400.0, 8001),
    "scale": RGrid(-1600.0, 1600.0, 8001),
    "constant_force": RGrid(-400.0, 420.0, 8201),
}


def default_grid(op: Operator) -> RGrid:
    try:
        return _DEFAULT_GRIDS[op.name]
    except KeyError:
        raise ValidationError(f"operator {op.name!r} has no continuous r-grid") from None


@dataclass(frozen=True, eq=False)
class Amplitude:
    """Sampled ``F(r)`` with a per-point absolute error bound."""

    grid: RGrid
    values: np.ndarray
    error: float
    operator: Operator
    beta: float = 0.0

    def density_values(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """``P(r)`` on a grid. ``tail_mass_estimate`` is the Parseval deficit ``max(0, 1 - grid integral)``."""

    grid: RGrid
    values: np.ndarray
    tail_mass_estimate: float
    beta: float
    operator: Operator
    # absolute error bound of each F sample that produced the density
    amplitude_error: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise ShapeError(f"density has {v.shape} samples for a grid of {self.grid.n_points}")
        if np.any(v < 0):
            raise ValidationError("density samples must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def integral(self) -> float:
        return float(self.grid.trapezoid(self.values))

    @property
    def total_mass(self) -> float:
        return self.integral + self.tail_mass_estimate


def _density(values: np.ndarray, grid: RGrid, beta: float, op: Operator, err: float, **meta) -> SampledDensity:
    p = np.abs(values) ** 2
    mass = float(grid.trapezoid(p))
    return SampledDensity(grid, p, max(0.0, 1.0 - mass), float(beta), op, err, dict(meta))


def _phase_measure(op: Operator, r_abs: float):
    def measure(xs):
        rate = r_abs * op.phase_rate(xs) + op.amplitude_rate(xs)
        steps = 0.5 * (rate[1:] + rate[:-1]) * np.diff(xs)
        return np.concatenate([[0.0], np.cumsum(steps)])

    return measure


def _probe_values(grid: RGrid) -> np.ndarray:
    probes = np.linspace(grid.r_min, grid.r_max, N_PROBES)
    if grid.r_min < 0 < grid.r_max:
        probes = np.append(probes, 0.0)
    return probes


def _scale_trim(f: SeedFunction) -> tuple[tuple[float, float], float]:
    """Trim a Scale seed away from x = 0 where the kernel blows up; return the neglected-integral bound."""
    if f.lo > 1e-3 * (f.hi - f.lo):
        return f.support, 0.0
    lo, hi = effective_support(f)
    thr = 1e-15 * f.max_abs()
    # |int_0^lo f(x) x^{-1/2} dx| / sqrt(2 pi) <= thr * 2 sqrt(lo) / sqrt(2 pi)
    return (lo, f.hi), thr * 2.0 * math.sqrt(max(lo, 0.0)) * _INV_SQRT_2PI


def nudft_uniform(weights: np.ndarray, phase: np.ndarray, grid: RGrid) -> np.ndarray:
    """``out[j] = sum_k weights[k] exp(-i r_j phase[k])`` for the uniform ``r_j`` of ``grid``."""
    weights = np.asarray(weights, dtype=complex)
    phase = np.asarray(phase, dtype=float)
    h = grid.spacing
    n = grid.n_points
    n_blocks = -(-n // DFT_BLOCK)
    starts = grid.r_min + DFT_BLOCK * h * np.arange(n_blocks)
    k = np.arange(DFT_BLOCK) * h
    out = np.zeros((DFT_BLOCK, n_blocks), dtype=complex)
    for s in range(0, len(phase), DFT_CHUNK):
        ph = phase[s:s + DFT_CHUNK]
        base = np.exp(-1j * np.outer(k, ph))
        cols = weights[s:s + DFT_CHUNK, None] * np.exp(-1j * np.outer(ph, starts))
        out += base @ cols
    return out.T.ravel()[:n]


@dataclass(frozen=True)
class _Rule:
    x: np.ndarray
    w: np.ndarray
    error: float


def _adaptive_rule(func, pieces, op: Operator, grid: RGrid, cfg: QuadratureConfig) -> _Rule:
    """Refine a composite rule on each piece until the probe transforms converge."""
    probes = _probe_values(grid)
    measure = _phase_measure(op, grid.r_abs_max)
    geometric = isinstance(op, Scale)
    xs, ws, err = [], [], 0.0

    def integrand(x):
        base = func(x) * op.amplitude(x)
        return base[:, None] * np.exp(-1j * np.outer(op.phase(x), probes))

    for a, b in pieces:
        if not b > a:
            continue
        edges = panels_from_measure(a, b, measure, math.pi, geometric=geometric and a > 0)
        # roundoff in r * phase(x) limits the attainable relative accuracy
        phase_max = float(np.abs(op.phase(np.array([a, b]))).max())
        noise = 64 * _EPS * (1.0 + grid.r_abs_max * phase_max)
        res = quad_integrate(integrand, (a, b), cfg, edges=edges, rel_noise=noise)
        x, w = composite_rule(res.edges, cfg.order)
        xs.append(x)
        ws.append(w)
        err += res.error
    return _Rule(np.concatenate(xs), np.concatenate(ws), err)


def _apply_rule(func, rule: _Rule, op: Operator, grid: RGrid) -> tuple[np.ndarray, float]:
    g = rule.w * func(rule.x) * op.amplitude(rule.x)
    values = nudft_uniform(g, op.phase(rule.x), grid)
    err = rule.error + _ROUNDOFF * float(np.abs(g).sum())
    return values, err


def seed_transform(f: SeedFunction, op: Operator, grid: RGrid | None = None,
                   cfg: QuadratureConfig | None = None) -> tuple[np.ndarray, float]:
    """Transform a single seed. Returns ``(values, abs_error_bound)``."""
    if not op.continuous:
        raise ValidationError(f"operator {op.name!r} has a discrete spectrum; use the discrete module")
    grid = grid or default_grid(op)
    cfg = cfg or QuadratureConfig()
    op.check_support(f.support)
    support, neglected = _scale_trim(f) if isinstance(op, Scale) else (f.support, 0.0)
    rule = _adaptive_rule(f, [support], op, grid, cfg)
    values, err = _apply_rule(f, rule, op, grid)
    return values, err + neglected


@dataclass(frozen=True, eq=False)
class LobeTransforms:
    """``F1`` and ``F2`` on one grid; any ``beta`` combines them without new quadrature."""

    operator: Operator
    grid: RGrid
    f1: np.ndarray
    f2: np.ndarray
    err1: float
    err2: float

    def combine(self, beta: float) -> np.ndarray:
        return (self.f1 + unit_phase(beta) * self.f2) / math.sqrt(2.0)

    @property
    def error(self) -> float:
        return (self.err1 + self.err2) / math.sqrt(2.0)

    def amplitude(self, beta: float) -> Amplitude:
        return Amplitude(self.grid, self.combine(beta), self.error, self.operator, float(beta))

    def density(self, beta: float) -> SampledDensity:
        return _density(self.combine(beta), self.grid, beta, self.operator, self.error)


_CACHE: dict = {}
_CACHE_SIZE = 64


def _cached_seed_transform(f: SeedFunction, op: Operator, grid: RGrid, cfg: QuadratureConfig):
    key = (id(f), op, grid, cfg)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    result = seed_transform(f, op, grid, cfg)
    if len(_CACHE) >= _CACHE_SIZE:
        _CACHE.pop(next(iter(_CACHE)))
    _CACHE[key] = (f, result)
    return result


def clear_cache() -> None:
    _CACHE.clear()


def lobe_transforms(state: SuperposedState, op: Operator, grid: RGrid | None = None,
                    cfg: QuadratureConfig | None = None) -> LobeTransforms:
    grid = grid or default_grid(op)
    cfg = cfg or QuadratureConfig()
    for part in state.parts:
        op.check_support(part.support)
    f1, e1 = _cached_seed_transform(state.part1, op, grid, cfg)
    f2, e2 = _cached_seed_transform(state.part2, op, grid, cfg)
    return LobeTransforms(op, grid, f1, f2, e1, e2)


def transform(state: SuperposedState, op: Operator, grid: RGrid | None = None,
              cfg: QuadratureConfig | None = None) -> Amplitude:
    return lobe_transforms(state, op, grid, cfg).amplitude(state.beta)


def density(state: SuperposedState, op: Operator, grid: RGrid | None = None,
            cfg: QuadratureConfig | None = None) -> SampledDensity:
    return lobe_transforms(state, op, grid, cfg).density(state.beta)


def transform_direct(state: SuperposedState, op: Operator, grid: RGrid | None = None,
                     cfg: QuadratureConfig | None = None) -> Amplitude:
    """Transform ``psi`` as one function over the hull of the supports, without the lobe split."""
    grid = grid or default_grid(op)
    cfg = cfg or QuadratureConfig()
    for part in state.parts:
        op.check_support(part.support)
    lo, hi = state.hull
    if isinstance(op, Scale):
        first = min(state.parts, key=lambda p: p.lo)
        lo = _scale_trim(first)[0][0]
    breaks = sorted({lo, hi, *(v for p in state.parts for v in p.support if lo < v < hi)})
    pieces = list(zip(breaks[:-1], breaks[1:]))
    rule = _adaptive_rule(state, pieces, op, grid, cfg)
    values, err = _apply_rule(state, rule, op, grid)
    return Amplitude(grid, values, err, op, state.beta)


def pure_shift(state: SuperposedState, tol: float = 1e-14) -> float | None:
    """Return ``D`` if ``part2(x) == part1(x - D)``, else ``None``."""
    p1, p2 = state.parts
    if len(p1.coeffs) != len(p2.coeffs):
        return None
    width1, width2 = p1.hi - p1.lo, p2.hi - p2.lo
    if abs(width1 - width2) > tol * max(1.0, width1):
        return None
    scale = np.abs(p1.coeffs).max()
    if np.abs(p1.coeffs - p2.coeffs).max() > tol * scale:
        return None
    return p2.lo - p1.lo


def closed_form_density_ex1(state: SuperposedState, grid: RGrid | None = None,
                            cfg: QuadratureConfig | None = None) -> SampledDensity:
    """``|F1(r)|**2 (1 + cos(r D - beta))`` for a pure-shift pair under ``Momentum``."""
    D = pure_shift(state)
    if D is None:
        raise ShapeError("closed form needs a pure-shift pair, part2(x) = part1(x - D)")
    op = Momentum()
    grid = grid or default_grid(op)
    f1, err = seed_transform(state.part1, op, grid, cfg)
    r = grid.values
    p = np.abs(f1) ** 2 * (1.0 + np.cos(r * D - state.beta))
    mass = float(grid.trapezoid(p))
    return SampledDensity(grid, p, max(0.0, 1.0 - mass), state.beta, op, err, {"D": D})


L1_UPSAMPLE = 8


def l1_distance(a: SampledDensity, b: SampledDensity, upsample: int = L1_UPSAMPLE) -> float:
    """``int |a - b| dr``.

    ``a - b`` is band-limited (it is the transform of a compactly supported
    correlation), but ``|a - b|`` has kinks at every sign change, which costs the
    plain trapezoid rule O(h^2). The difference is first resampled ``upsample``
    times finer by FFT zero padding, then integrated by the trapezoid rule.
    The densities must be negligible at both grid ends (the resampling is periodic).
    """
    if a.grid != b.grid:
        raise GridMismatchError(f"densities live on different grids: {a.grid} vs {b.grid}")
    d = a.values - b.values
    if upsample > 1:
        n = len(d)
        fine = np.fft.irfft(np.fft.rfft(d), upsample * n) * upsample
        return float(a.grid.spacing / upsample * np.abs(fine).sum())
    return float(a.grid.trapezoid(np.abs(d)))


def scale_transform_log(f: SeedFunction, r, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """Scale transform through ``y = ln x``: a plain Fourier integral of ``f(e^y) e^{y/2}``."""
    cfg = cfg or QuadratureConfig()
    Scale().check_support(f.support)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    (lo, hi), _ = _scale_trim(f)
    ya, yb = math.log(lo), math.log(hi)

    def integrand(y):
        g = f(np.exp(y)) * np.exp(0.5 * y) * _INV_SQRT_2PI
        return g[:, None] * np.exp(-1j * np.outer(y, r))

    n_panels = max(1, int(math.ceil(np.abs(r).max(initial=0.0) * (yb - ya) / math.pi)))
    res = quad_integrate(integrand, (ya, yb), cfg, edges=np.linspace(ya, yb, n_panels + 1))
    return np.asarray(res.value)


def mellin_transform(f: SeedFunction, s, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """``M[f](s) = int_0^inf x**(s - 1) f(x) dx`` for complex ``s``, by adaptive quadrature in x."""
    cfg = cfg or QuadratureConfig()
    if f.lo < 0:
        raise ValidationError("Mellin transform needs a seed supported in x >= 0")
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    (lo, hi), _ = _scale_trim(f)

    def integrand(x):
        return f(x)[:, None] * np.exp(np.outer(np.log(x), s - 1.0))

    turns = np.abs(s.imag).max(initial=0.0) * math.log(hi / lo) / math.pi
    edges = np.geomspace(lo, hi, max(1, int(math.ceil(turns))) + 1)
    res = quad_integrate(integrand, (lo, hi), cfg, edges=edges)
    return np.asarray(res.value)
