import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import DEFAULT_BETAS
from mindet.errors import DomainError, GridMismatchError, ShapeError, ValidationError
from mindet.operators import Momentum, PositionPlusMomentum, Scale
from mindet.seedfn import make_bump, shift_scale, superpose
from mindet.xform import (
    RGrid,
    SampledDensity,
    closed_form_density_ex1,
    default_grid,
    l1_distance,
    lobe_transforms,
    mellin_transform,
    pure_shift,
    scale_transform_log,
    seed_transform,
    transform,
    transform_direct,
)

SMALL = RGrid(-40.0, 40.0, 801)


def _index(grid, r):
    i = int(round((r - grid.r_min) / grid.spacing))
    assert abs(grid.values[i] - r) < 1e-9
    return i


def test_grid_validation():
    with pytest.raises(ValidationError):
        RGrid(1.0, 1.0, 10)
    with pytest.raises(ValidationError):
        RGrid(0.0, 1.0, 1)
    g = RGrid(-1, 1, 5)
    assert g.spacing == 0.5 and g.values.tolist() == [-1, -0.5, 0, 0.5, 1]


def test_state_transform_at_zero(state0, lobes):
    F = lobes["momentum"].combine(0.0)
    i0 = _index(lobes["momentum"].grid, 0.0)
    assert F[i0].real == pytest.approx(oracles.F_STATE_AT_0, rel=1e-13)
    assert abs(F[i0].imag) <= lobes["momentum"].error
    assert lobes["momentum"].f1[i0].real == pytest.approx(oracles.F1_AT_0, rel=1e-13)


@pytest.mark.parametrize("r", sorted(oracles.F1_SQ))
def test_first_lobe_modulus_against_oracle(lobes, r):
    g = lobes["momentum"].grid
    assert abs(lobes["momentum"].f1[_index(g, r)]) ** 2 == pytest.approx(oracles.F1_SQ[r], rel=1e-12)


def test_pure_shift_phase(lobes):
    L = lobes["momentum"]
    r = L.grid.values
    assert np.max(np.abs(L.f2 - np.exp(-3j * r) * L.f1)) < 1e-13


def test_ppm_zero_c_matches_momentum(state0):
    a = transform(state0, PositionPlusMomentum(0.0), SMALL).values
    b = transform(state0, Momentum(), SMALL).values
    assert np.max(np.abs(a - b)) < 1e-15


def test_ppm_shift_structure(lobes):
    # |F2(r)| = |F1(r - c D)| with c = 1, D = 3: a shift by 30 samples on the default grid
    L = lobes["position_plus_momentum"]
    k = _index(L.grid, L.grid.r_min + 3.0)
    assert np.max(np.abs(np.abs(L.f2[k:]) - np.abs(L.f1[:-k]))) < 1e-8


@pytest.mark.parametrize("name", ["momentum", "position_plus_momentum", "scale", "constant_force"])
@pytest.mark.parametrize("beta", DEFAULT_BETAS)
def test_parseval_and_nonnegativity(lobes, name, beta):
    d = lobes[name].density(beta)
    assert np.all(d.values >= 0)
    assert abs(d.total_mass - 1.0) <= 1e-6
    assert abs(d.integral - 1.0) <= 1e-6


@pytest.mark.parametrize("name", ["momentum", "scale"])
def test_lobe_reuse_matches_direct_transform(pair, name, operators):
    op = operators[name]
    grid = SMALL if name == "momentum" else RGrid(-60.0, 60.0, 601)
    for beta in (0.0, 1.1):
        s = superpose(*pair, beta)
        assert np.max(np.abs(transform(s, op, grid).values - transform_direct(s, op, grid).values)) < 1e-12


def test_closed_form_matches_pipeline(state0, lobes):
    for beta in DEFAULT_BETAS:
        s = state0.with_beta(beta)
        exact = closed_form_density_ex1(s)
        assert np.max(np.abs(exact.values - lobes["momentum"].density(beta).values)) < 1e-8


def test_closed_form_spot_values(state0):
    g = RGrid(-2 * math.pi, 2 * math.pi, 13)
    f1, _ = seed_transform(state0.part1, Momentum(), g)
    i0 = _index(g, 0.0)
    p0 = closed_form_density_ex1(state0, g)
    assert p0.values[i0] == pytest.approx(2 * abs(f1[i0]) ** 2, rel=1e-15)
    assert closed_form_density_ex1(state0.with_beta(math.pi), g).values[i0] == pytest.approx(0.0, abs=1e-30)
    # r D - beta = pi/2 at r = pi/6 for beta = 0
    g2 = RGrid(0.0, math.pi / 6, 2)
    f1b, _ = seed_transform(state0.part1, Momentum(), g2)
    assert closed_form_density_ex1(state0, g2).values[1] == pytest.approx(abs(f1b[1]) ** 2, rel=1e-12)


def test_closed_form_needs_pure_shift(psi1):
    s = superpose(psi1, shift_scale(psi1, 2.0, 3.0))
    assert pure_shift(s) is None
    with pytest.raises(ShapeError):
        closed_form_density_ex1(s)


def test_scale_log_substitution_and_mellin(psi1):
    f = shift_scale(psi1, 1.0, 0.5)
    g = RGrid(-30.0, 30.0, 61)
    F, _ = seed_transform(f, Scale(), g)
    r = g.values
    assert np.max(np.abs(F - scale_transform_log(f, r))) < 1e-8
    M = mellin_transform(f, 0.5 - 1j * r) / math.sqrt(2 * math.pi)
    assert np.max(np.abs(F - M)) < 1e-8


def test_scale_allows_support_touching_zero(psi1):
    F, err = seed_transform(psi1, Scale(), RGrid(-20.0, 20.0, 41))
    assert np.all(np.isfinite(F)) and err < 1e-8
    with pytest.raises(DomainError):
        seed_transform(make_bump(1, (-0.5, 0.5)), Scale(), SMALL)


def test_l1_properties(lobes):
    L = lobes["momentum"]
    a, b = L.density(0.0), L.density(math.pi)
    assert l1_distance(a, a) == 0.0
    assert l1_distance(a, b) == pytest.approx(l1_distance(b, a), rel=1e-15)
    assert l1_distance(a, b) == pytest.approx(oracles.EX1_L1_0_PI, abs=1e-6)


def test_l1_grid_mismatch(lobes, state0):
    a = lobes["momentum"].density(0.0)
    b = lobe_transforms(state0, Momentum(), SMALL).density(0.0)
    with pytest.raises(GridMismatchError):
        l1_distance(a, b)


def test_sampled_density_validation():
    g = RGrid(0, 1, 3)
    with pytest.raises(ShapeError):
        SampledDensity(g, np.ones(4), 0.0, 0.0, Momentum())
    with pytest.raises(ValidationError):
        SampledDensity(g, np.array([1.0, -1.0, 0.0]), 0.0, 0.0, Momentum())


def test_default_grid_only_for_continuous():
    from mindet.operators import HarmonicOscillator

    with pytest.raises(ValidationError):
        default_grid(HarmonicOscillator())


@given(beta=st.floats(-10, 10))
@settings(max_examples=25, deadline=None)
def test_density_is_two_pi_periodic_in_beta(lobes, beta):
    L = lobes["momentum"]
    assert np.max(np.abs(L.density(beta).values - L.density(beta + 2 * math.pi).values)) < 1e-13
