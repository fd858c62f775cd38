"""Adaptive composite Gauss-Legendre quadrature.

The integrand may be vector valued: ``integrand(x)`` receives a 1-D array of
nodes and returns an array whose first axis matches ``x``. The trailing axes
are integrated independently, and a panel is refined until the worst
component meets its share of the tolerance. The final panel layout is
returned so that callers can reuse it as a fixed rule for a larger family of
integrands that share the same oscillation structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-13
    order: int = 16
    max_subdivisions: int = 200_000
    initial_panels: int = 1


@dataclass(frozen=True)
class QuadResult:
    value: complex | float | np.ndarray
    error: float
    edges: np.ndarray

    def rule(self, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
        return composite_rule(self.edges, order)


@lru_cache(maxsize=32)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_rule(edges, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of ``order``-point Gauss-Legendre on every panel."""
    edges = np.asarray(edges, dtype=float)
    xg, wg = _leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    x = (0.5 * (lo + hi))[:, None] + half[:, None] * xg[None, :]
    w = half[:, None] * wg[None, :]
    return x.ravel(), w.ravel()


def _panel_sums(integrand, lo, hi, order):
    xg, wg = _leggauss(order)
    half = 0.5 * (hi - lo)
    x = (0.5 * (lo + hi))[:, None] + half[:, None] * xg[None, :]
    fx = np.asarray(integrand(x.ravel()))
    fx = fx.reshape(x.shape + fx.shape[1:])
    w = (half[:, None] * wg[None, :]).reshape(x.shape + (1,) * (fx.ndim - 2))
    return (w * fx).sum(axis=1), (np.abs(w) * np.abs(fx)).sum(axis=1)


def quad_integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    cfg: QuadratureConfig | None = None,
    *,
    edges=None,
    rel_noise: float | None = None,
) -> QuadResult:
    """Integrate ``integrand`` over ``interval`` to absolute accuracy ``cfg.tol``.

    Each panel is compared against its two halves; the difference is the
    panel's error estimate, and accepted panels contribute the (more
    accurate) two-half sum. A floor proportional to machine epsilon times the
    panel's absolute integral keeps roundoff from forcing endless bisection.

    Parameters
    ----------
    integrand
        Vectorized callable, see module docstring.
    interval
        ``(a, b)``. A zero-width interval integrates to zero.
    cfg
        Tolerance and panel order.
    edges
        Optional initial panel edges spanning ``interval``. Use this to seed
        the refinement with panels that already respect known oscillation.
    rel_noise
        Relative noise level of the integrand values (default ``64 eps``).
        A panel whose error estimate is below ``rel_noise`` times its
        absolute integral is accepted; oscillatory kernels with large phases
        need a larger value because the phase itself carries roundoff.

    Raises
    ------
    QuadratureError
        If the number of panels exceeds ``cfg.max_subdivisions``. The worst
        unconverged subinterval is attached to the exception.
    """
    cfg = cfg or QuadratureConfig()
    noise = 64 * _EPS if rel_noise is None else float(rel_noise)
    a, b = float(interval[0]), float(interval[1])
    probe = np.asarray(integrand(np.array([a])))
    if a == b:
        return QuadResult(np.zeros(probe.shape[1:], dtype=probe.dtype)[()], 0.0, np.array([a, b]))
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    length = b - a
    if edges is None:
        edges = np.linspace(a, b, max(1, cfg.initial_panels) + 1)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()

    total = np.zeros(probe.shape[1:], dtype=np.result_type(probe.dtype, float))
    err_total = 0.0
    kept: list[np.ndarray] = []
    n_seen = len(lo)
    while len(lo):
        mid = 0.5 * (lo + hi)
        whole, _ = _panel_sums(integrand, lo, hi, cfg.order)
        left, abs_l = _panel_sums(integrand, lo, mid, cfg.order)
        right, abs_r = _panel_sums(integrand, mid, hi, cfg.order)
        halves = left + right
        diff = np.abs(whole - halves)
        absint = abs_l + abs_r
        if diff.ndim > 1:
            diff = diff.reshape(len(lo), -1).max(axis=1)
            absint = absint.reshape(len(lo), -1).max(axis=1)
        local_tol = np.maximum(cfg.tol * (hi - lo) / length, noise * absint)
        ok = diff <= local_tol
        if ok.any():
            total = total + halves[ok].sum(axis=0)
            err_total += float(diff[ok].sum())
            kept.extend([lo[ok], mid[ok], hi[ok]])
        bad = ~ok
        if not bad.any():
            break
        n_seen += int(bad.sum())
        if n_seen > cfg.max_subdivisions:
            worst = int(np.argmax(np.where(bad, diff, -np.inf)))
            raise QuadratureError(
                f"quadrature did not converge after {n_seen} panels; "
                f"worst subinterval [{lo[worst]:.6g}, {hi[worst]:.6g}] error {diff[worst]:.3g}",
                (float(lo[worst]), float(hi[worst])),
                float(diff[worst]),
            )
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])

    final_edges = np.unique(np.concatenate(kept))
    value = sign * total
    return QuadResult(value[()] if np.ndim(value) == 0 else value, err_total, final_edges)


def panels_from_measure(a: float, b: float, measure: Callable[[np.ndarray], np.ndarray],
                        max_step: float, *, geometric: bool = False, n_samples: int = 8193) -> np.ndarray:
    """Edges on ``[a, b]`` such that a monotone ``measure`` grows at most ``max_step`` per panel.

    ``measure(x)`` must be nondecreasing with ``measure(a) == 0``. It is
    sampled on a fine auxiliary grid (log-spaced if ``geometric``) and
    inverted by linear interpolation.
    """
    if geometric and a > 0:
        xs = np.geomspace(a, b, n_samples)
    else:
        xs = np.linspace(a, b, n_samples)
    m = np.maximum.accumulate(np.asarray(measure(xs), dtype=float))
    n_panels = max(1, int(np.ceil(m[-1] / max_step)))
    targets = np.linspace(0.0, m[-1], n_panels + 1)
    edges = np.interp(targets, m, xs)
    edges[0], edges[-1] = a, b
    return np.unique(edges)
