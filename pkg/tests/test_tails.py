import math

import numpy as np
import pytest
from scipy.integrate import quad

from mindet.tails import fit_stretched_exponential, stretched_tail_moment, tail_moment_bound
from mindet.xform import RGrid


def test_fit_recovers_parameters():
    log_A, a, q = 0.3, 1.7, 0.6
    pts = [(r, math.exp(log_A - a * r ** q)) for r in (10.0, 14.0, 20.0)]
    fit = fit_stretched_exponential(pts)
    assert fit == pytest.approx((log_A, a, q), rel=1e-9)


def test_fit_rejects_non_decay():
    assert fit_stretched_exponential([(1, 1.0), (2, 1.0), (3, 0.5)]) is None
    assert fit_stretched_exponential([(1, 1.0), (2, 2.0), (3, 0.5)]) is None


@pytest.mark.parametrize("n", [0, 1, 3])
def test_tail_moment_against_quad(n):
    log_A, a, q, R = 0.0, 2.0, 0.5, 9.0
    ref, _ = quad(lambda r: r ** n * math.exp(log_A - a * r ** q), R, np.inf, epsrel=1e-12, limit=200)
    assert stretched_tail_moment(log_A, a, q, R, n) == pytest.approx(ref, rel=1e-9)


def test_bound_covers_true_tail():
    g = RGrid(-30.0, 30.0, 6001)
    p = np.exp(-2.0 * np.sqrt(np.abs(g.values)))
    bound = tail_moment_bound(g, p, 3)
    for n in range(4):
        true = 2 * quad(lambda r: r ** n * math.exp(-2 * math.sqrt(r)), 30, np.inf, limit=200)[0]
        assert true <= bound[n] <= 10 * true


def test_bound_infinite_without_decay():
    g = RGrid(-10.0, 10.0, 201)
    assert all(math.isinf(b) for b in tail_moment_bound(g, np.ones(201), 2))
