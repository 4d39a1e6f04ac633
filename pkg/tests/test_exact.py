import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import binomial_mixture, enumerate_terminal, majority_fraction
from urnldp import urn as U
from urnldp.errors import UrnValidationError
from urnldp.exact import (
    conditional_marginals,
    mgf_recursion_residual,
    phi_n,
    psi_n,
    terminal_distribution,
)


@pytest.mark.parametrize("urn", [U.identity(), U.constant(0.3), U.majority(3)], ids=["identity", "constant", "majority"])
@pytest.mark.parametrize("n", [2, 7, 12])
def test_dp_matches_enumeration(urn, n):
    exact = np.array(enumerate_terminal(urn, n))
    assert np.max(np.abs(terminal_distribution(urn, n).p - exact)) <= 1e-12


def test_fixed_start_matches_enumeration():
    u = U.linear(0.3, 0.2)
    exact = np.array(enumerate_terminal(u, 11, init=(3, 2)))
    assert np.max(np.abs(terminal_distribution(u, 11, init=(3, 2)).p - exact)) <= 1e-12


def test_constant_urn_is_binomial_mixture():
    n = 500
    assert np.max(np.abs(terminal_distribution(U.constant(0.3), n).p - binomial_mixture(n, 0.3))) < 1e-13


def test_mass_is_conserved_at_scale():
    assert terminal_distribution(U.majority(3), 3000).total_log_mass() == pytest.approx(0.0, abs=1e-10)


def test_colour_symmetry():
    # pi(s) = 1 - pi(1 - s) makes the law symmetric under k -> n - k
    p = terminal_distribution(U.majority(3), 301).p
    assert np.max(np.abs(p - p[::-1])) < 1e-14


def test_psi_n_constant_urn():
    n = 400
    d = terminal_distribution(U.constant(0.3), n)
    lam = 0.7
    expected = (np.log(0.5 + 0.5 * np.exp(lam)) + (n - 1) * np.log(0.7 + 0.3 * np.exp(lam))) / n
    assert psi_n(d, lam) == pytest.approx(expected, rel=1e-12)
    assert psi_n(d, 0.0) == 0.0
    assert psi_n(d, [0.0, lam])[1] == pytest.approx(expected, rel=1e-12)


def test_phi_n_extremes_linear():
    d = terminal_distribution(U.linear(0.3, 0.2), 2000)
    assert phi_n(d, 1.0) == pytest.approx(np.log(0.5), abs=1e-12)
    assert abs(phi_n(d, 0.375)) < 0.01


def test_subtractive_mass_outside_walls_is_zero():
    n = 600
    p = terminal_distribution(U.subtractive_urn(), n).p
    k = np.arange(n + 1)
    assert p[(k < n / 3) | (k > 2 * n / 3)].sum() == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.6), st.floats(-0.9, 0.35), st.floats(-3, 3))
def test_mgf_recursion(a, b, lam):
    if a + b >= 1 or a + b <= 0:
        return
    assert mgf_recursion_residual(U.linear(a, b), 80, lam) < 1e-12


def test_inhomogeneous_family_uses_member_for_n():
    family = lambda n: U.constant(0.3 + 1.0 / n)
    d = terminal_distribution(family, 50)
    assert np.max(np.abs(d.p - binomial_mixture(50, 0.32))) < 1e-13


def test_bridge_of_constant_urn_is_linear():
    n, k = 100, 37
    taus = np.linspace(0.05, 1, 20)
    means = conditional_marginals(U.constant(0.6), n, k, taus, init=(1, 1))
    j = np.maximum(1, np.floor(taus * n + 1e-12))
    assert np.max(np.abs(means - (1 + (k - 1) * (j - 1) / (n - 1)) / j)) < 1e-12


def test_majority_bridge_concentrates():
    taus = np.linspace(0.1, 1, 91)
    target = majority_fraction(0.8, taus)
    gaps = []
    for n in (200, 400):
        means = conditional_marginals(U.majority(3), n, int(0.8 * n), taus, init=(2, 1))
        gaps.append(np.max(np.abs(means - target)))
    assert gaps[1] <= 0.05 and gaps[1] < gaps[0]


@pytest.mark.parametrize("init", [(0, 0), (3, 4), "left", (5, 1)])
def test_bad_initial_conditions(init):
    with pytest.raises(UrnValidationError):
        terminal_distribution(U.constant(0.5), 4, init=init)


def test_unreachable_bridge_terminal():
    with pytest.raises(UrnValidationError):
        conditional_marginals(U.subtractive_urn(), 30, 2, [0.5])
