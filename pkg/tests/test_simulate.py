import numpy as np
import pytest

from urnldp import simulate as sim
from urnldp import urn as U
from urnldp.errors import UrnValidationError
from urnldp.exact import terminal_distribution


def test_terminal_histogram_matches_dp():
    n = 30
    counts = sim.empirical_terminal(U.constant(0.3), n, 200_000, seed=7)
    assert counts.sum() == 200_000
    assert sim.total_variation(counts, terminal_distribution(U.constant(0.3), n).p) < 0.006


def test_fixed_start_histogram():
    n = 25
    u = U.majority(3)
    counts = sim.empirical_terminal(u, n, 100_000, seed=3, init=(2, 1))
    assert sim.total_variation(counts, terminal_distribution(u, n, init=(2, 1)).p) < 0.01


def test_same_seed_same_output():
    a = sim.empirical_terminal(U.linear(0.3, 0.2), 40, 5000, seed=11)
    b = sim.empirical_terminal(U.linear(0.3, 0.2), 40, 5000, seed=11)
    c = sim.empirical_terminal(U.linear(0.3, 0.2), 40, 5000, seed=12)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_worker_count_does_not_change_results(monkeypatch):
    trials = sim.BLOCK + 1000
    monkeypatch.setenv("URNLDP_THREADS", "1")
    serial = sim.empirical_terminal(U.constant(0.4), 10, trials, seed=5)
    monkeypatch.setenv("URNLDP_THREADS", "3")
    assert sim.worker_count() == 3
    assert np.array_equal(serial, sim.empirical_terminal(U.constant(0.4), 10, trials, seed=5))


def test_sample_path_is_admissible_and_reproducible():
    p = sim.sample_path(U.majority(3), 500, seed=1, trial=4)
    q = sim.sample_path(U.majority(3), 500, seed=1, trial=4)
    assert np.array_equal(p.counts, q.counts)
    assert p.counts.size == 500 and set(np.diff(p.counts)) <= {0, 1}


def test_walls_are_respected():
    n = 200
    counts = sim.empirical_terminal(U.subtractive_urn(), n, 2000, seed=2)
    k = np.arange(n + 1)
    assert counts[(k < n / 3) | (k > 2 * n / 3)].sum() == 0


def test_inhomogeneous_family():
    family = lambda n: U.constant(0.3 + 1.0 / n)
    counts = sim.empirical_terminal(family, 20, 50_000, seed=9)
    assert sim.total_variation(counts, terminal_distribution(family, 20).p) < 0.015


def test_rejects_bad_paths_and_counts():
    with pytest.raises(UrnValidationError):
        sim.PathSample(3, np.array([0, 2, 2]), seed=0)
    with pytest.raises(UrnValidationError):
        sim.empirical_terminal(U.constant(0.5), 5, 0, seed=0)
