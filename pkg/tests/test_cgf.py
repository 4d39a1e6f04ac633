import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from oracles import kl
from urnldp import urn as U
from urnldp.cgf import (
    CgfCurve,
    bernoulli_cgf,
    boundary_gaps,
    curvature_probe,
    implicit_residual,
    incomplete_beta,
    legendre_phi,
    legendre_psi,
    linear_cgf_closed_form,
    linear_cgf_with_slope,
    linear_conjugate,
    rate_phi,
    rate_phi_detail,
    solve_cgf,
)
from urnldp.contacts import find_contacts
from urnldp.errors import UrnValidationError

LINEAR_CASES = [(0.3, 0.2), (0.3, -0.5), (0.2, 0.75)]
LAMBDAS = np.geomspace(0.01, 10, 25)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0, 1), st.floats(0, 1))
def test_incomplete_beta_against_scipy(alpha, beta, x, y):
    x1, x2 = min(x, y), max(x, y)
    # integrand (1 - t)^(alpha-1) t^(beta-1): scipy's betainc(a, b, x) integrates t^(a-1) (1-t)^(b-1)
    expected = special.beta(beta, alpha) * (special.betainc(beta, alpha, x2) - special.betainc(beta, alpha, x1))
    assert incomplete_beta(alpha, beta, x1, x2) == pytest.approx(expected, rel=1e-9, abs=1e-13)


def test_incomplete_beta_divergence_rejected():
    with pytest.raises(UrnValidationError):
        incomplete_beta(1.0, -0.5, 0.0, 0.5)
    with pytest.raises(UrnValidationError):
        incomplete_beta(0.0, 1.0, 0.5, 1.0)


def test_bernoulli_is_exact_solution():
    lam = np.concatenate([-LAMBDAS, LAMBDAS])
    psi = bernoulli_cgf(0.3, lam)
    dpsi = 0.3 * np.exp(lam) / (0.7 + 0.3 * np.exp(lam))
    assert np.max(np.abs(implicit_residual(U.constant(0.3), lam, psi, dpsi))) <= 1e-12


@pytest.mark.parametrize("a,b", LINEAR_CASES)
def test_closed_form_satisfies_implicit_relation(a, b):
    u = U.linear(a, b)
    for lam in np.concatenate([-LAMBDAS, LAMBDAS]):
        psi, dpsi = linear_cgf_with_slope(a, b, lam)
        assert abs(implicit_residual(u, lam, psi, dpsi)) <= 1e-8


@pytest.mark.parametrize("a,b", LINEAR_CASES)
def test_closed_form_against_ode(a, b):
    u = U.linear(a, b)
    eps = 1e-8 if b > 0.5 else 1e-4
    for side in (1, -1):
        curve = solve_cgf(u, side=side, eps=eps, lambdas=LAMBDAS)
        assert curve.max_residual <= 1e-8
        assert np.max(np.abs(curve.psi - linear_cgf_closed_form(a, b, curve.lambdas))) <= 1e-5


def test_closed_form_colour_swap():
    # swapping colours maps a + b s to (1 - a - b) + b s and psi(lam) to lam + psi(-lam)
    a, b = 0.3, 0.2
    for lam in (0.5, 3.0):
        assert linear_cgf_closed_form(a, b, -lam) == pytest.approx(-lam + linear_cgf_closed_form(1 - a - b, b, lam),
                                                                   rel=1e-13)


def test_constant_urn_ode_is_bernoulli():
    curve = solve_cgf(U.constant(0.3), lambdas=LAMBDAS)
    assert curve.method == "bernoulli"
    assert np.max(np.abs(curve.psi - bernoulli_cgf(0.3, LAMBDAS))) < 1e-13


def test_majority_ode_residual():
    u = U.majority(3)
    for side in (1, -1):
        curve = solve_cgf(u, side=side, lambda_max=10)
        assert curve.max_residual <= 1e-8
        assert np.all(np.diff(curve.dpsi) >= -1e-7)


def test_curvature_probe():
    growing = curvature_probe(0.2, 0.75)
    assert np.all(growing[1:] / growing[:-1] > 2.0)
    bounded = curvature_probe(0.3, -0.5)
    assert np.max(np.abs(bounded)) < 1.0
    assert np.max(bounded) / np.min(bounded) < 1.1


@pytest.mark.parametrize("a,b,eps,far", [(0.3, 0.2, 1e-4, 20.0), (0.3, -0.5, 1e-4, 20.0), (0.2, 0.75, 1e-10, 20.0)])
def test_boundary_gaps(a, b, eps, far):
    # for b > 1/2 the true gap at the near end shrinks only like eps^(1/b - 1)
    u = U.linear(a, b)
    an = find_contacts(u)
    for side in (1, -1):
        near, far_gap = boundary_gaps(solve_cgf(u, an, side, lambda_max=far, eps=eps), an)
        assert near <= 1e-3 and far_gap <= 1e-2


def test_legendre_of_constant_urn_is_minus_kl():
    u = U.constant(0.3)
    curves = [solve_cgf(u, side=s, lambda_max=30, steps=400) for s in (1, -1)]
    for s in (0.05, 0.2, 0.3, 0.5, 0.9):
        assert legendre_phi(curves, s) == pytest.approx(-kl(s, 0.3), abs=1e-6)


def test_legendre_round_trip_on_constant_urn():
    s = np.linspace(0, 1, 2001)
    phi = np.array([-kl(x, 0.3) for x in s])
    lam = np.array([-2.0, 0.5, 1.5])
    assert np.max(np.abs(legendre_psi(s, phi, lam) - bernoulli_cgf(0.3, lam))) < 1e-5


def test_linear_conjugate_matches_sampled_legendre():
    a, b = 0.3, 0.2
    curve = solve_cgf(U.linear(a, b), side=1, lambda_max=30, steps=400)
    for s in (0.5, 0.7, 0.9):
        value, lam = linear_conjugate(a, b, s)
        assert legendre_phi(curve, s) == pytest.approx(value, abs=1e-7)
        assert linear_cgf_with_slope(a, b, lam)[1] == pytest.approx(s, abs=1e-12)


def test_rate_phi_structure():
    lin = U.linear(0.3, 0.2)
    assert rate_phi(lin, 0.375) == 0.0
    assert rate_phi(lin, 1.0) == pytest.approx(math.log(0.5), abs=1e-14)
    assert rate_phi(U.majority(3), 0.8) == 0.0
    assert rate_phi(U.subtractive_urn(), 0.9) == -math.inf
    detail = rate_phi_detail(lin, 0.8)
    assert detail.method == "legendre"
    assert detail.value == pytest.approx(linear_conjugate(0.3, 0.2, 0.8)[0], abs=1e-7)


@pytest.mark.parametrize(
    "lam,psi,dpsi",
    [([0.1, 0.05], [0.01, 0.005], [0.1, 0.2]), ([0.1, 0.2], [0.5, 0.1], [0.1, 0.2]), ([0.1, 0.2], [0.01, 0.02], [0.3, 0.1])],
)
def test_invalid_curves(lam, psi, dpsi):
    with pytest.raises(UrnValidationError):
        CgfCurve(1, lam, psi, dpsi)
