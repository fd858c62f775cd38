"""Tail estimates for moments of a density sampled on a finite r-grid.

Transforms of bump seeds decay like a stretched exponential, so each side's
envelope is modelled as ``A exp(-a |r|^q)``. Envelope values are block maxima
(the densities oscillate through interference), taken at three radii on
each side. ``A, a, q`` follow from the three log-envelope values, and the
tail moment is then an upper incomplete gamma function:

    int_R^inf r^n A exp(-a r^q) dr = A / (q a^((n+1)/q)) * Gamma((n+1)/q, a R^q).

A safety factor covers the model error. If a side does not decay the tail is
reported as infinite, which the moment routines turn into a budget error.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaincc, gammaln

SAFETY = 4.0
# Block maxima below this are treated as roundoff; the tail is then bounded by the floor itself.
NOISE_FLOOR = 1e-30
_BLOCK_CENTRES = (0.6, 0.8, 1.0)
_BLOCK_FRACTION = 0.04


def _side_envelope(r_abs: np.ndarray, p: np.ndarray, R: float):
    """Three ``(radius, envelope)`` pairs on one side, innermost first."""
    width = _BLOCK_FRACTION * R
    out = []
    for frac in _BLOCK_CENTRES:
        hi = frac * R
        mask = (r_abs > hi - width) & (r_abs <= hi + 1e-12 * R)
        if not mask.any():
            return None
        # a decreasing envelope attains its block maximum near the inner edge
        out.append((hi - width, float(p[mask].max())))
    return out


def fit_stretched_exponential(points) -> tuple[float, float, float] | None:
    """Fit ``log E = log A - a r^q`` through three points; ``None`` if they do not decay."""
    (r1, e1), (r2, e2), (r3, e3) = points
    if not (e1 > e2 > e3 > 0):
        return None
    l1, l2, l3 = math.log(e1), math.log(e2), math.log(e3)
    target = (l1 - l2) / (l2 - l3)

    def g(q):
        return (r2 ** q - r1 ** q) / (r3 ** q - r2 ** q) - target

    q_lo, q_hi = 0.05, 4.0
    if g(q_lo) * g(q_hi) > 0:
        # outside the bracket: take the nearer end (conservative: smaller q decays slower)
        q = q_lo if abs(g(q_lo)) < abs(g(q_hi)) else q_hi
    else:
        q = brentq(g, q_lo, q_hi, xtol=1e-12)
    a = (l1 - l3) / (r3 ** q - r1 ** q)
    if not a > 0:
        return None
    log_A = l3 + a * r3 ** q
    return log_A, a, q


def stretched_tail_moment(log_A: float, a: float, q: float, R: float, n: int) -> float:
    """``int_R^inf r^n A exp(-a r^q) dr``."""
    s = (n + 1) / q
    log_val = log_A - math.log(q) - s * math.log(a) + gammaln(s) + math.log(max(gammaincc(s, a * R ** q), 1e-300))
    return math.exp(log_val) if log_val < 700 else math.inf


def tail_moment_bound(grid, p: np.ndarray, n_max: int, *, deficit: float = 0.0) -> list[float]:
    """Estimated ``int_{|r| > edge} |r|^n P(r) dr`` for ``n = 0..n_max`` (both sides summed)."""
    r = grid.values
    p = np.asarray(p, dtype=float)
    totals = np.zeros(n_max + 1)
    for sign, edge in ((-1.0, grid.r_min), (1.0, grid.r_max)):
        R = abs(edge)
        side = (r * sign) > 0 if edge * sign > 0 else None
        if side is None or R == 0.0:
            # grid does not extend past zero on this side; the whole half line is missing
            totals[:] = math.inf
            continue
        pts = _side_envelope(np.abs(r[side]), p[side], R)
        if pts is None:
            totals[:] = math.inf
            continue
        if pts[-1][1] < NOISE_FLOOR:
            for n in range(n_max + 1):
                totals[n] += NOISE_FLOOR * R ** (n + 1)
            continue
        fit = fit_stretched_exponential(pts)
        if fit is None:
            totals[:] = math.inf
            continue
        for n in range(n_max + 1):
            totals[n] += SAFETY * stretched_tail_moment(*fit, R, n)
    if deficit > 1e-12:
        R = grid.r_abs_max
        for n in range(n_max + 1):
            totals[n] = max(totals[n], deficit * R ** n)
    return [float(t) for t in totals]
