"""Sample-path rate functional ``I = J - S`` on discretised trajectories.

``J`` integrates the binary entropy ``H(x) = x log x + (1 - x) log(1 - x)`` of
the slope; ``S`` integrates the log-likelihood of each increment under the
urn evaluated at the running fraction ``phi / tau``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import UrnValidationError
from .urn import UrnFunction

ADMISSIBLE_TOL = 1e-12
ZERO_PROB = 1e-300
NEGATIVE_NOISE = 1e-9


@dataclass(frozen=True)
class Trajectory:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        problems = admissibility_problems(grid, values)
        if problems:
            raise UrnValidationError("inadmissible trajectory", problems)

    @classmethod
    def line(cls, s: float, nodes: int = 1001) -> "Trajectory":
        grid = np.linspace(0.0, 1.0, nodes)
        return cls(grid, s * grid)

    @property
    def slopes(self) -> np.ndarray:
        return np.clip(np.diff(self.values) / np.diff(self.grid), 0.0, 1.0)

    @property
    def midpoint_ratio(self) -> np.ndarray:
        """phi/tau at cell midpoints; equals the first slope on the first cell when phi(0) = 0."""
        mid_phi = 0.5 * (self.values[1:] + self.values[:-1])
        mid_tau = 0.5 * (self.grid[1:] + self.grid[:-1])
        return np.clip(mid_phi / mid_tau, 0.0, 1.0)


def admissibility_problems(grid: np.ndarray, values: np.ndarray) -> list[str]:
    problems = []
    if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
        return ["grid and values must be 1-d arrays of equal length >= 2"]
    if grid[0] != 0.0 or grid[-1] != 1.0:
        problems.append("grid must start at 0 and end at 1")
    dt = np.diff(grid)
    if np.any(dt <= 0):
        problems.append("grid must be strictly increasing")
    if abs(values[0]) > ADMISSIBLE_TOL:
        problems.append("phi(0) must be 0")
    dphi = np.diff(values)
    if np.any(dphi < -ADMISSIBLE_TOL):
        problems.append("phi must be non-decreasing")
    if np.any(dphi > dt + ADMISSIBLE_TOL):
        problems.append("phi must be 1-Lipschitz")
    return problems


def binary_entropy(x):
    x = np.asarray(x, dtype=float)
    return xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)


def entropy_J(t: Trajectory) -> float:
    return float(np.sum(np.diff(t.grid) * binary_entropy(t.slopes)))


def _safe_log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(p < ZERO_PROB, -np.inf, np.log(np.maximum(p, ZERO_PROB)))


def action_S(u: UrnFunction, t: Trajectory) -> float:
    dt = np.diff(t.grid)
    dphi = np.clip(np.diff(t.values), 0.0, dt)
    ratio = t.midpoint_ratio
    p = u(ratio)
    up = dphi * _safe_log(p)
    down = (dt - dphi) * _safe_log(1.0 - p)
    # 0 * log 0 = 0: increments that are absent carry no cost
    up = np.where(dphi == 0.0, 0.0, up)
    down = np.where(dt - dphi == 0.0, 0.0, down)
    return float(np.sum(up + down))


def rate_I(u: UrnFunction, t: Trajectory) -> float:
    s = action_S(u, t)
    if s == -np.inf:
        return float("inf")
    value = entropy_J(t) - s
    if value < 0.0:
        if value < -NEGATIVE_NOISE:
            warnings.warn(f"rate functional {value:.3g} below numerical noise", RuntimeWarning, stacklevel=2)
        value = 0.0
    return float(value)
