"""Zero-cost trajectories: paths with vanishing rate that end at a given fraction.

Inside a K interval with sign ``a`` the running fraction ``u_tau = phi_tau / tau``
of a zero-cost path leaves the unstable end ``s_star`` of the interval at an
exit time ``tau_star`` and then solves ``F(s, u_tau) = log(1 / tau)``, where

    F(s, u) = integral from u to s of dz / (pi(z) - z).

``tau_star = exp(-|F(s, s_star)|)`` is positive exactly when the integrand is
integrable at ``s_star``.  Paths that reach the stable end ``s_dagger`` before
time 1 form a one-parameter family indexed by the hitting time ``t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .contacts import ContactAnalysis
from .errors import NumericalError, UrnValidationError
from .quadrature import tanh_sinh
from .rate import Trajectory
from .urn import UrnFunction

CONTACT_TOL = 1e-12
DIVERGENCE_EXPONENT = 1.0 - 1e-3
LADDER = 10.0 ** -np.arange(2.0, 8.5, 0.5)  # |z - s0| from 1e-2 to 1e-8
TAIL_WIDTH = 1e-10
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class ZeroCostTrajectory:
    s_target: float
    interval_index: int | None
    tau_star: float
    s_star: float
    t_hit: float | None
    curve: Trajectory
    u: np.ndarray  # phi / tau on the grid (u[0] is the limit at tau = 0)

    @property
    def grid(self) -> np.ndarray:
        return self.curve.grid


def local_exponent(u: UrnFunction, s0: float, side: int) -> tuple[float, float]:
    """Fit ``|pi(z) - z| ~ c |z - s0|^gamma`` on a geometric ladder on one side of ``s0``.

    Returns ``(gamma, c)``; ``gamma = inf`` when the gap vanishes identically.
    """
    z = s0 + side * LADDER
    z = z[(z >= 0.0) & (z <= 1.0)]
    d = np.abs(z - s0)
    gap = np.abs(u(z) - z)
    keep = gap > 0.0
    if keep.sum() < 3:
        return math.inf, 0.0
    slope, intercept = np.polyfit(np.log(d[keep]), np.log(gap[keep]), 1)
    return float(slope), float(math.exp(intercept))


def is_divergent(u: UrnFunction, s0: float, side: int, override: bool | None = None) -> bool:
    """Whether ``1/(pi(z) - z)`` fails to be integrable at the contact ``s0`` from ``side``."""
    if override is not None:
        return bool(override)
    declared = u.params.get("divergent_at") if hasattr(u.params, "get") else None
    if declared is not None:
        for point, value in declared:
            if abs(point - s0) < 1e-12:
                return bool(value)
    gamma, _ = local_exponent(u, s0, side)
    return gamma >= DIVERGENCE_EXPONENT



def _is_contact(u: UrnFunction, z: float) -> bool:
    return abs(u(z) - z) <= CONTACT_TOL


def _tail(u: UrnFunction, e: float, side: int, width: float) -> float:
    """Integral of 1/(pi - z) over the ``width`` next to contact ``e`` from a local power law."""
    z1 = e + side * width
    z2 = e + side * width / 2.0
    d1, d2 = abs(z1 - e), abs(z2 - e)
    g1, g2 = u(z1) - z1, u(z2) - z2
    if d1 == 0.0:
        return 0.0
    if g1 == 0.0:
        raise NumericalError(f"pi(z) = z at {z1}, next to the contact {e}")
    if d1 < 1e-14 * max(1.0, abs(e)) or g2 == 0.0 or d2 == 0.0 or d1 == d2:
        # too close to e for a two-point fit in double precision
        gamma, _ = local_exponent(u, e, side)
    else:
        gamma = math.log(abs(g1) / abs(g2)) / math.log(d1 / d2)
    if gamma >= 1.0:
        raise NumericalError(f"local exponent {gamma:.4f} >= 1 near {e}: integral diverges")
    return d1 / (g1 * (1.0 - gamma))


def _plain_integral(u: UrnFunction, lo: float, hi: float) -> float:
    res = tanh_sinh(lambda z, da, db: 1.0 / (u(z) - z), lo, hi, rtol=1e-14, max_level=12)
    if not res.converged and res.error > 1e-10 * max(1.0, abs(res.value)):
        warnings.warn(f"F quadrature on [{lo}, {hi}] not converged (error {res.error:.2e})", RuntimeWarning,
                      stacklevel=3)
    return res.value


def f_pi(u: UrnFunction, s: float, x: float, divergent: bool | None = None) -> float:
    """``F(s, x) = integral_x^s dz / (pi(z) - z)``.

    Either end may sit on a contact; integrable endpoint singularities are
    handled by cutting a width of 1e-10 and adding the power-law tail, and
    non-integrable ones return a signed infinity.
    """
    if s == x:
        return 0.0
    lo, hi = min(s, x), max(s, x)
    orientation = 1.0 if s > x else -1.0
    mid = 0.5 * (lo + hi)
    inner_sign = math.copysign(1.0, u(mid) - mid)
    width = min(TAIL_WIDTH, 1e-3 * (hi - lo))
    ends = [(e, side) for e, side in ((lo, 1), (hi, -1)) if _is_contact(u, e)]
    if len(ends) == 1 and hi - lo <= TAIL_WIDTH:
        e, side = ends[0]
        if is_divergent(u, e, side, divergent):
            return orientation * inner_sign * math.inf
        return orientation * _tail(u, e, side, hi - lo)
    total = 0.0
    a, b = lo, hi
    for e, side in ((lo, 1), (hi, -1)):
        if _is_contact(u, e):
            if is_divergent(u, e, side, divergent):
                return orientation * inner_sign * math.inf
            total += _tail(u, e, side, width)
            if side == 1:
                a = lo + width
            else:
                b = hi - width
    total += _plain_integral(u, a, b)
    return orientation * total


def _segment(u: UrnFunction, a: float, b: float, s_star: float) -> float:
    """Integral of 1/(pi - z) from a to b for a short segment away from contacts."""
    if a == b:
        return 0.0
    if _is_contact(u, a) or _is_contact(u, b):
        return f_pi(u, b, a)
    length = abs(b - a)
    distance = min(abs(a - s_star), abs(b - s_star))
    if distance > 4.0 * length:
        half = 0.5 * (b - a)
        z = 0.5 * (a + b) + half * GL_NODES
        return float(half * np.sum(GL_WEIGHTS / (u(z) - z)))
    return _plain_integral(u, min(a, b), max(a, b)) * (1.0 if b > a else -1.0)


def _march(u: UrnFunction, start: float, s_star: float, q_values: np.ndarray, q_limit: float,
           tol: float = 1e-12, max_iter: int = 80) -> np.ndarray:
    """Solve ``F(start, u_k) = q_k`` for increasing ``q_k``, moving from ``start`` toward ``s_star``.

    Each solve is a safeguarded Newton iteration on ``u`` (bisection inside the
    bracket formed by the previous root and ``s_star``), with ``F`` updated by
    short segment integrals.
    """
    out = np.empty_like(q_values)
    cur_u = start
    cur_f = 0.0
    start_is_contact = _is_contact(u, start)
    for k, q in enumerate(q_values):
        if q >= q_limit:
            out[k:] = s_star
            break
        # bracket between s_star (F = q_limit > q) and the current point (F = cur_f <= q)
        near, far = cur_u, s_star
        f_near = cur_f
        x = cur_u
        g = u(x) - x
        if g == 0.0 or (start_is_contact and x == start):
            x = near + 1e-3 * (far - near)
        else:
            x = near + (f_near - q) * g
        for _ in range(max_iter):
            if not (min(near, far) < x < max(near, far)):
                x = 0.5 * (near + far)
            fx = f_near + _segment(u, x, near, s_star)
            if not math.isfinite(fx):
                raise NumericalError("F became non-finite while inverting")
            if abs(fx - q) <= tol * max(1.0, q):
                break
            if fx < q:
                near, f_near = x, fx
            else:
                far = x
            gx = u(x) - x
            x_new = x + (fx - q) * gx
            if abs(x_new - x) <= 1e-16 * max(1.0, abs(x)) or abs(far - near) <= 4e-16:
                x = x_new if min(near, far) <= x_new <= max(near, far) else x
                break
            x = x_new
        else:
            raise NumericalError(f"root-finding for F = {q:.6g} did not converge")
        out[k] = x
        cur_f = f_near + _segment(u, x, near, s_star)
        cur_u = x
    return out


def tau_star(u: UrnFunction, analysis: ContactAnalysis, i: int, s: float, divergent: bool | None = None) -> float:
    """Exit time from the unstable end of interval ``i`` for a path ending at ``s``."""
    _check_interval(analysis, i)
    s_star = analysis.emanation_point(i)
    f = f_pi(u, s, s_star, divergent)
    return 0.0 if math.isinf(f) else math.exp(-abs(f))


def theta_star(u: UrnFunction, analysis: ContactAnalysis, i: int, divergent: bool | None = None) -> float:
    """``exp(-|F(s_dagger, s_star)|)``: 0 when either end is non-integrable."""
    _check_interval(analysis, i)
    f = f_pi(u, analysis.stable_end(i), analysis.emanation_point(i), divergent)
    return 0.0 if math.isinf(f) else math.exp(-abs(f))


def _check_interval(analysis: ContactAnalysis, i: int) -> None:
    if not 0 <= i < len(analysis.intervals):
        raise UrnValidationError("bad interval index", [f"{i} not in 0..{len(analysis.intervals) - 1}"])
    lo, hi = analysis.intervals[i]
    if hi <= lo:
        raise UrnValidationError("empty K interval", [f"interval {i} is empty"])
    if analysis.interval_signs[i] == 0:
        raise UrnValidationError("plateau interval", [f"interval {i} lies on the diagonal"])
    if i == 0 or i == len(analysis.intervals) - 1:
        raise UrnValidationError(
            "outer interval",
            [f"interval {i} lies outside [inf C, sup C]; no zero-cost path ends there"],
        )


def time_grid(nodes: int, kinks: tuple[float, ...] = (), decades: float = 3.0, ratio: float = 1.1) -> np.ndarray:
    """Uniform grid plus geometric refinement (ratio 1.1) on both sides of each kink.

    The refinement spans ``decades`` decades below the uniform spacing and one
    decade above it, so it blends into the uniform part without a jump.
    """
    h = 1.0 / (nodes - 1)
    parts = [np.linspace(0.0, 1.0, nodes)]
    count = int(math.ceil((decades + 1.0) * math.log(10.0) / math.log(ratio)))
    offsets = 10.0 * h * ratio ** -np.arange(count + 1)
    for kink in kinks:
        parts.append(np.array([kink]))
        parts.append(kink + offsets)
        parts.append(kink - offsets)
    grid = np.unique(np.concatenate(parts))
    return grid[(grid >= 0.0) & (grid <= 1.0)]


def _line(s: float, nodes: int, index: int | None) -> ZeroCostTrajectory:
    grid = np.linspace(0.0, 1.0, nodes)
    return ZeroCostTrajectory(s, index, 0.0, s, None, Trajectory(grid, s * grid), np.full(nodes, s))


def zero_cost_interior(u: UrnFunction, analysis: ContactAnalysis, s: float, nodes: int = 10_001,
                       divergent: bool | None = None) -> ZeroCostTrajectory:
    """Zero-cost path ending at ``s``.

    Contacts and plateau points get the straight line ``phi = s tau``.
    """
    i = analysis.interval_index(s)
    on_contact = i is None or analysis.interval_signs[i] == 0 or _is_contact(u, s)
    if on_contact:
        if i is None and not any(abs(s - c) < 1e-9 for c in analysis.boundary):
            raise UrnValidationError("target not located", [f"s={s} is neither in a K interval nor a contact"])
        return _line(s, nodes, i)
    _check_interval(analysis, i)
    s_star = analysis.emanation_point(i)
    f_total = f_pi(u, s, s_star, divergent)
    exit_time = 0.0 if math.isinf(f_total) else math.exp(-abs(f_total))
    grid = time_grid(nodes, (exit_time,) if exit_time > 0.0 else (0.0,))
    values = np.full(grid.size, s_star)
    active = grid > exit_time
    q = -np.log(grid[active][::-1])
    values[active] = _march(u, s, s_star, q, abs(f_total))[::-1]
    values[-1] = s
    phi = grid * values
    phi[0] = 0.0
    return ZeroCostTrajectory(s, i, exit_time, s_star, None, Trajectory(grid, _admissible(grid, phi)), values)


def _admissible(grid: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Remove rounding-level violations of 0 <= d phi <= d tau."""
    out = phi.copy()
    dt = np.diff(grid)
    for k in range(1, out.size):
        step = out[k] - out[k - 1]
        if step < 0.0 and step > -1e-12:
            out[k] = out[k - 1]
        elif step > dt[k - 1] and step < dt[k - 1] + 1e-12:
            out[k] = out[k - 1] + dt[k - 1]
    return out


def zero_cost_boundary(u: UrnFunction, analysis: ContactAnalysis, i: int, t: float, nodes: int = 10_001,
                       divergent: bool | None = None) -> ZeroCostTrajectory:
    """Member ``t`` of the family of zero-cost paths that reach the stable end at time ``t``.

    ``u_tau`` is ``s_dagger`` on (t, 1], solves ``F(s_dagger, u) = log(t / tau)`` on
    (theta* t, t] and equals ``s_star`` on [0, theta* t].
    """
    if not 0.0 <= t <= 1.0:
        raise UrnValidationError("bad hitting time", [f"t={t} outside [0, 1]"])
    _check_interval(analysis, i)
    s_star = analysis.emanation_point(i)
    s_dag = analysis.stable_end(i)
    side = -1 if analysis.interval_signs[i] > 0 else 1  # direction from s_dagger into the interval
    if is_divergent(u, s_dag, side, divergent):
        warnings.warn("F diverges at the stable end; only the straight line exists", RuntimeWarning, stacklevel=2)
        traj = _line(s_dag, nodes, i)
        return ZeroCostTrajectory(s_dag, i, 0.0, s_dag, None, traj.curve, traj.u)
    if t == 0.0:
        grid = np.linspace(0.0, 1.0, nodes)
        return ZeroCostTrajectory(s_dag, i, 0.0, s_star, 0.0, Trajectory(grid, s_star * grid), np.full(nodes, s_star))
    f_total = f_pi(u, s_dag, s_star, divergent)
    theta = 0.0 if math.isinf(f_total) else math.exp(-abs(f_total))
    kinks = tuple(k for k in (theta * t, t) if 0.0 < k < 1.0) or (0.0,)
    if theta == 0.0:
        kinks = kinks + (0.0,)
    grid = time_grid(nodes, kinks)
    values = np.where(grid > t, s_dag, s_star)
    active = (grid > theta * t) & (grid <= t)
    q = np.log(t / grid[active][::-1])
    values[active] = _march(u, s_dag, s_star, q, abs(f_total))[::-1]
    phi = grid * values
    return ZeroCostTrajectory(s_dag, i, theta * t, s_star, t, Trajectory(grid, _admissible(grid, phi)), values)


def verify_homogeneous(u: UrnFunction, curve: Trajectory, kinks: tuple[float, ...] = ()) -> float:
    """Largest ``|slope - pi(phi_mid / tau_mid)|`` over interior cells.

    The first and last cells and cells within three cells of a kink are skipped.
    """
    slope = np.diff(curve.values) / np.diff(curve.grid)
    residual = np.abs(slope - u(curve.midpoint_ratio))
    keep = np.ones(residual.size, dtype=bool)
    keep[0] = keep[-1] = False
    for kink in kinks:
        j = int(np.searchsorted(curve.grid, kink))
        keep[max(0, j - 3): j + 3] = False
    return float(residual[keep].max()) if keep.any() else 0.0
