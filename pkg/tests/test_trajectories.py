import math

import numpy as np
import pytest

from oracles import arcsin_boundary_fraction, arcsin_exit_time, arcsin_fraction, majority_fraction
from urnldp import urn as U
from urnldp.contacts import find_contacts
from urnldp.errors import UrnValidationError
from urnldp.rate import Trajectory, rate_I
from urnldp import trajectories as T


@pytest.fixture(scope="module")
def majority():
    u = U.majority(3)
    return u, find_contacts(u)


@pytest.fixture(scope="module")
def arcsin():
    u = U.arcsin_urn()
    return u, find_contacts(u)


@pytest.mark.parametrize("s", [0.2, 0.8])
def test_majority_matches_closed_form(majority, s):
    u, a = majority
    path = T.zero_cost_interior(u, a, s)
    assert path.tau_star == 0.0 and path.s_star == 0.5
    inner = path.grid > 0
    assert np.max(np.abs(path.u[inner] - majority_fraction(s, path.grid[inner]))) <= 1e-8
    assert rate_I(u, path.curve) <= 1e-6
    assert T.verify_homogeneous(u, path.curve) < 1e-3


def test_majority_is_divergent_at_the_unstable_point(majority):
    u, _ = majority
    gamma, _ = T.local_exponent(u, 0.5, 1)
    assert gamma == pytest.approx(1.0, abs=1e-4)  # fitted on a finite ladder
    assert T.is_divergent(u, 0.5, 1) and T.is_divergent(u, 0.5, -1)


def test_arcsin_exit_time_and_path(arcsin):
    u, a = arcsin
    s = 3 / 8
    i = a.interval_index(s)
    assert T.tau_star(u, a, i, s) == pytest.approx(arcsin_exit_time(s), rel=1e-10)
    assert T.tau_star(u, a, i, s) == pytest.approx(math.exp(-math.pi / 2), rel=1e-10)
    path = T.zero_cost_interior(u, a, s)
    assert np.max(np.abs(path.u - arcsin_fraction(np.maximum(path.grid, path.tau_star), path.tau_star))) <= 1e-8
    assert rate_I(u, path.curve) <= 1e-6
    assert T.verify_homogeneous(u, path.curve, (path.tau_star,)) < 1e-3


def test_arcsin_theta(arcsin):
    u, a = arcsin
    assert T.theta_star(u, a, a.interval_index(3 / 8)) == pytest.approx(math.exp(-math.pi), rel=1e-10)


def test_arcsin_boundary_family(arcsin):
    u, a = arcsin
    t = 0.6
    path = T.zero_cost_boundary(u, a, a.interval_index(3 / 8), t)
    assert path.tau_star == pytest.approx(math.exp(-math.pi) * t, rel=1e-10)
    middle = (path.grid > path.tau_star) & (path.grid <= t)
    expected = arcsin_boundary_fraction(path.grid[middle], t)
    assert np.max(np.abs(path.u[middle] - expected)) < 1e-9
    assert np.all(path.u[path.grid > t] == 0.5)
    assert rate_I(u, path.curve) <= 1e-6


def test_perturbation_is_detected(majority):
    u, a = majority
    path = T.zero_cost_interior(u, a, 0.8)
    g = path.grid
    bent = Trajectory(g, path.curve.values + 0.01 * np.sin(np.pi * g) ** 2)
    assert rate_I(u, bent) > 1e-4


def test_contact_target_gives_line(majority):
    u, a = majority
    path = T.zero_cost_interior(u, a, 0.5, nodes=11)
    assert np.allclose(path.curve.values, 0.5 * path.grid)


def test_outer_and_plateau_intervals_rejected():
    u = U.linear(0.3, 0.2)
    a = find_contacts(u)
    with pytest.raises(UrnValidationError):
        T.zero_cost_interior(u, a, 0.1)
    ident = U.identity()
    with pytest.raises(UrnValidationError):
        T.tau_star(ident, find_contacts(ident), 1, 0.4)


def test_integrable_endpoint_is_not_divergent():
    # pi - s ~ sqrt(s - 1/4) near a square-root contact
    u = U.arcsin_urn()
    assert T.local_exponent(u, 0.25, 1)[0] == pytest.approx(0.5, abs=1e-3)
    assert not T.is_divergent(u, 0.25, 1)


def test_f_pi_linear_urn_closed_form():
    # pi(s) - s = (a - (1 - b) s), so F = log|...| / (1 - b)
    lin = U.linear(0.3, 0.2)
    s0 = 0.375
    f = T.f_pi(lin, 0.2, 0.1)
    expected = -math.log(abs(0.3 - 0.8 * 0.2) / abs(0.3 - 0.8 * 0.1)) / 0.8
    assert f == pytest.approx(expected, rel=1e-12)
    assert math.isinf(T.f_pi(lin, 0.2, s0))


def test_time_grid_refines_around_kinks():
    g = T.time_grid(101, (0.3,))
    assert g[0] == 0.0 and g[-1] == 1.0 and 0.3 in g
    assert np.min(np.diff(g)) < 1e-4 and np.all(np.diff(g) > 0)


def test_majority_f_and_midpoint_values(majority):
    u, a = majority
    # tau(v) = rho(s) / rho(v) with rho(v) = 4v(1-v)/(2v-1)^2
    assert T.f_pi(u, 0.8, 0.6) == pytest.approx(math.log(13.5), abs=1e-8)
    path = T.zero_cost_interior(u, a, 0.8)
    assert np.interp(0.5, path.grid, path.u) == pytest.approx(0.7343, abs=1e-4)
