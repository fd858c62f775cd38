import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import DEFAULT_BETAS
from mindet.errors import DerivativeBudgetError, TailBudgetError, ValidationError
from mindet.moments import (
    OPERATOR_PATH,
    R_DOMAIN_PATH,
    Tolerances,
    apply_operator,
    cross_term,
    moments_operator_path,
    moments_r_domain,
    verify_m_indeterminate,
)
from mindet.operators import Momentum, Scale
from mindet.seedfn import SuperposedState, default_pair, differentiate, shift_scale, superpose
from mindet.xform import RGrid, lobe_transforms

OPS = ["momentum", "position_plus_momentum", "scale", "constant_force"]
# module-level so operator powers are cached across hypothesis examples
PAIR = default_pair()


def test_apply_operator_matches_derivative(bump_m11):
    g = apply_operator(Momentum(), bump_m11)
    x = np.linspace(-0.9, 0.9, 11)
    assert np.allclose(g(x), -1j * differentiate(bump_m11, 1)(x), atol=1e-14)


@pytest.mark.parametrize("name", OPS)
def test_operator_path_basics(state0, operators, name):
    rep = moments_operator_path(state0, operators[name], 6)
    assert rep.path == OPERATOR_PATH
    assert abs(rep.moments[0] - 1.0) <= max(rep.abs_error_estimates[0], 1e-12)
    assert rep.meta["imag_residue_max"] < 1e-10
    assert rep.to_dict()["operator"]["name"] == name


@pytest.mark.parametrize("name", ["momentum", "scale"])
def test_first_moment_of_real_seed_vanishes(state0, operators, name):
    assert abs(moments_operator_path(state0, operators[name], 1).moments[1]) <= 1e-10


def test_momentum_second_moment_oracle(state0):
    rep = moments_operator_path(state0, Momentum(), 2)
    assert rep.moments[2] == pytest.approx(oracles.MOMENTUM_E2, rel=1e-12)


def test_r_domain_path(lobes):
    for beta in DEFAULT_BETAS:
        rep = moments_r_domain(lobes["momentum"].density(beta), 4)
        assert rep.path == R_DOMAIN_PATH
        assert abs(rep.moments[0] - 1.0) <= 1e-6
        assert abs(rep.moments[1]) <= rep.abs_error_estimates[1] + 1e-12
        assert abs(rep.moments[2] - oracles.MOMENTUM_E2) <= rep.abs_error_estimates[2]


def test_r_domain_tail_budget_enforced(state0):
    narrow = RGrid(-20.0, 20.0, 401)
    with pytest.raises(TailBudgetError):
        moments_r_domain(lobe_transforms(state0, Momentum(), narrow).density(0.0), 4)


@pytest.mark.parametrize("name", OPS)
def test_cross_terms_vanish_on_disjoint_pair(state0, operators, name):
    for n in range(7):
        assert abs(cross_term(state0, operators[name], n)) <= 1e-12


def test_cross_terms_on_overlapping_fixture(psi1):
    s = SuperposedState(psi1, shift_scale(psi1, 1.0, 0.5), 0.0)
    assert cross_term(s, Momentum(), 1) == pytest.approx(oracles.OVERLAP_CROSS_1, rel=1e-10)
    assert cross_term(s, Momentum(), 2) == pytest.approx(oracles.OVERLAP_CROSS_2, rel=1e-10)


def test_derivative_budget(state0):
    with pytest.raises(DerivativeBudgetError):
        moments_operator_path(state0, Momentum(), 20)


@given(b1=st.floats(-math.pi, math.pi), b2=st.floats(-math.pi, math.pi))
@settings(max_examples=20, deadline=None)
def test_beta_invariance_property(b1, b2):
    m1 = moments_operator_path(superpose(*PAIR, b1), Scale(), 6).moments
    m2 = moments_operator_path(superpose(*PAIR, b2), Scale(), 6).moments
    assert np.all(np.abs(m1 - m2) <= 1e-8 * (1 + np.abs(m1)))


def test_verify_passes_for_momentum(pair):
    rep = verify_m_indeterminate(*pair, Momentum(), DEFAULT_BETAS, 6)
    assert rep.verdict, rep.reasons
    d = rep.to_dict()
    assert d["verdict"] == "pass" and len(d["pairwise_l1"]) == 3


def test_verify_identical_betas_fail(pair):
    rep = verify_m_indeterminate(*pair, Momentum(), [0.0, 0.0], 4)
    assert not rep.verdict
    assert any("indistinguishable densities" in r for r in rep.reasons)


def test_verify_impossible_tolerance_reports_spread(pair):
    rep = verify_m_indeterminate(*pair, Momentum(), DEFAULT_BETAS, 4, Tolerances(moments=0.0))
    assert not rep.verdict
    assert any("moment spread" in r for r in rep.reasons)


def test_verify_needs_two_betas(pair):
    with pytest.raises(ValidationError):
        verify_m_indeterminate(*pair, Momentum(), [0.0], 4)
