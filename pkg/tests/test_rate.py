import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kl
from urnldp import urn as U
from urnldp.errors import UrnValidationError
from urnldp.rate import Trajectory, binary_entropy, entropy_J, rate_I


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(-math.log(2), rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.0, 1.0))
def test_line_under_constant_urn_is_kl(p, s):
    # a straight line at slope s costs KL(s || p) under a constant urn
    assert rate_I(U.constant(p), Trajectory.line(s, 101)) == pytest.approx(kl(s, p), abs=1e-12)


def test_line_at_contact_is_free():
    assert rate_I(U.linear(0.3, 0.2), Trajectory.line(0.375)) < 1e-15


def test_forbidden_increment_costs_infinity():
    # pi = 0 above 2/3 so a line of slope 0.9 is impossible
    assert rate_I(U.subtractive_urn(), Trajectory.line(0.9)) == math.inf


def test_entropy_of_broken_line():
    grid = np.array([0.0, 0.5, 1.0])
    t = Trajectory(grid, np.array([0.0, 0.5, 0.5]))
    assert entropy_J(t) == 0.0


@pytest.mark.parametrize(
    "grid,values",
    [
        ([0.0, 0.5, 1.0], [0.1, 0.2, 0.3]),
        ([0.0, 0.5, 1.0], [0.0, 0.3, 0.2]),
        ([0.0, 0.5, 1.0], [0.0, 0.7, 0.8]),
        ([0.0, 0.6, 0.5, 1.0], [0.0, 0.1, 0.2, 0.3]),
        ([0.1, 1.0], [0.0, 0.5]),
    ],
)
def test_inadmissible_trajectories(grid, values):
    with pytest.raises(UrnValidationError):
        Trajectory(np.array(grid), np.array(values))


def test_perturbed_line_costs_more():
    u = U.linear(0.3, 0.2)
    t = Trajectory.line(0.375)
    bent = Trajectory(t.grid, t.values + 0.01 * np.sin(np.pi * t.grid) ** 2)
    assert rate_I(u, bent) > 1e-4
