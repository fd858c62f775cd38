import math

import numpy as np
import pytest
from scipy.integrate import quad

import oracles
from mindet.errors import DomainError, ShapeError, ValidationError
from mindet.operators import PositionPlusMomentum, Scale
from mindet.reference import (
    HeydeParams,
    extract_stieltjes_form,
    heyde_density,
    heyde_l1_distance,
    heyde_moment_numeric,
    heyde_table,
    lognormal_density,
    lognormal_integral,
    lognormal_moment,
    vanishing_moments,
)
from mindet.seedfn import shift_scale, superpose

INV_SQRT_2PI = 1 / math.sqrt(2 * math.pi)


def test_lognormal_values():
    assert lognormal_density(1.0) == pytest.approx(INV_SQRT_2PI, rel=1e-15)
    assert lognormal_density(1.0) == pytest.approx(0.3989423, abs=5e-8)
    assert lognormal_density(math.e) == pytest.approx(math.exp(-1.5) * INV_SQRT_2PI, rel=1e-14)
    assert lognormal_integral() == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(DomainError):
        lognormal_density(0.0)


def test_heyde_values():
    x = np.array([0.3, 1.0, 2.5])
    assert np.allclose(heyde_density(x, HeydeParams(0.0, 1)), lognormal_density(x), rtol=0, atol=0)
    for eps, k in [(1.0, 1), (-0.5, 3)]:
        assert heyde_density(1.0, HeydeParams(eps, k)) == pytest.approx(INV_SQRT_2PI, rel=1e-15)
    x = math.exp(0.25)
    assert heyde_density(x, HeydeParams(1.0, 1)) == pytest.approx(2 * lognormal_density(x), rel=1e-14)


def test_lognormal_moments_closed_form():
    assert lognormal_moment(0) == 1.0
    assert lognormal_moment(1) == pytest.approx(1.6487213, abs=5e-8)
    assert lognormal_moment(2) == pytest.approx(7.3890561, abs=5e-8)


@pytest.mark.parametrize("n,eps,k,tol", [(0, 1.0, 1, 1e-8), (3, 0.5, 1, 1e-6), (2, -1.0, 2, 1e-6)])
def test_heyde_moment_examples(n, eps, k, tol):
    assert heyde_moment_numeric(n, HeydeParams(eps, k)) == pytest.approx(math.exp(n * n / 2), rel=tol)


@pytest.mark.parametrize("n,eps,k", [(1, 1.0, 1), (2, -0.5, 2)])
def test_heyde_moment_second_route(n, eps, k):
    # plain x-domain quadrature, independent of the log substitution
    p = HeydeParams(eps, k)
    val, _ = quad(lambda x: x ** n * heyde_density(x, p), 0, 1, epsrel=1e-12, limit=400)
    val2, _ = quad(lambda x: x ** n * heyde_density(x, p), 1, np.inf, epsrel=1e-12, limit=400)
    assert val + val2 == pytest.approx(heyde_moment_numeric(n, p), rel=1e-8)


def test_heyde_table_rows():
    rows = heyde_table()
    assert len(rows) == 50
    for n in range(5):
        vals = [r["numeric"] for r in rows if r["n"] == n]
        assert (max(vals) - min(vals)) / math.exp(n * n / 2) <= 1e-6


@pytest.mark.parametrize("eps,k", [(2.0, 1), (-1.5, 1), (0.5, 0), (0.5, 1.5), (0.5, -2)])
def test_heyde_param_validation(eps, k):
    with pytest.raises(ValidationError):
        HeydeParams(eps, k)


def test_heyde_order_budget():
    with pytest.raises(ValidationError):
        heyde_moment_numeric(9, HeydeParams())


@pytest.mark.parametrize("k", [1, 2])
def test_heyde_l1(k):
    d = heyde_l1_distance(HeydeParams(0.0, k), HeydeParams(1.0, k))
    assert d >= 0.1
    assert d == pytest.approx(oracles.HEYDE_L1_0_1, abs=1e-5)


def test_stieltjes_form(state0, lobes):
    s = state0.with_beta(0.3)
    form = extract_stieltjes_form(s)
    r = form.grid.values
    i = int(np.argmin(np.abs(r - 0.1)))  # r = beta / D
    assert form.h[i] == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.abs(form.density_values() - lobes["momentum"].density(0.3).values)) <= 1e-8
    vals, errs = vanishing_moments(form, 4)
    assert np.all(np.abs(vals) <= errs)


def test_stieltjes_rejections(pair, psi1):
    with pytest.raises(ShapeError):
        extract_stieltjes_form(superpose(*pair), PositionPlusMomentum(1.0))
    with pytest.raises(ShapeError):
        extract_stieltjes_form(superpose(*pair), Scale())
    with pytest.raises(ShapeError):
        extract_stieltjes_form(superpose(psi1, shift_scale(psi1, 2.0, 3.0)))
    extract_stieltjes_form(superpose(*pair), PositionPlusMomentum(0.0))
