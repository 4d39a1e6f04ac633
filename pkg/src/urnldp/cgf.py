"""Cumulant generating function ``psi(lambda) = lim n^-1 log E exp(lambda X_n)``.

``psi`` satisfies the implicit relation ``pi(psi') = (e^psi - 1) / (e^lambda - 1)``.
On the positive side ``psi'`` runs over the upper tail (sup C, z_plus] and is
recovered by inverting ``pi`` there; the negative side is the same problem for
the colour-swapped urn ``1 - pi(1 - s)``.  The terminal rate function is the
concave conjugate ``phi(s) = inf_lambda {psi(lambda) - lambda s}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq, minimize_scalar

from .contacts import ContactAnalysis, find_contacts
from .errors import NumericalError, UrnValidationError
from .exact import phi_n, terminal_distribution
from .quadrature import tanh_sinh
from .urn import UrnFunction, from_callable

RESIDUAL_TOL = 1e-8
MONOTONE_TOL = 1e-12
TABLE_SIZE = 4097
FAR_MARGIN = 30.0


@dataclass(frozen=True)
class CgfCurve:
    side: int  # +1 for lambda > 0, -1 for lambda < 0
    lambdas: np.ndarray  # ascending, all of one sign
    psi: np.ndarray
    dpsi: np.ndarray
    method: str = "ode"
    max_residual: float = 0.0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=float))
        object.__setattr__(self, "dpsi", np.asarray(self.dpsi, dtype=float))
        problems = []
        if self.side not in (1, -1):
            problems.append("side must be +1 or -1")
        if lam.size and (np.any(lam * self.side <= 0) or np.any(np.diff(lam) <= 0)):
            problems.append("lambdas must be ascending, non-zero and of the side's sign")
        ratio = self.psi / lam
        if np.any(ratio < -1e-9) or np.any(ratio > 1 + 1e-9):
            problems.append("psi / lambda must lie in [0, 1]")
        if np.any(np.diff(self.dpsi) < -1e-7):
            problems.append("dpsi must be non-decreasing (psi convex)")
        if problems:
            raise UrnValidationError("invalid CGF curve", problems)


def _ratio(lam, psi):
    """``(e^psi - 1) / (e^lambda - 1)`` without overflow or cancellation."""
    lam = np.asarray(lam, dtype=float)
    psi = np.asarray(psi, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        small = np.expm1(psi) / np.expm1(lam)
        large = np.exp(psi - lam) * np.expm1(-psi) / np.expm1(-lam)
    out = np.where(lam > 1.0, large, small)
    return float(out) if out.ndim == 0 else out


def implicit_residual(u: UrnFunction, lam, psi, dpsi):
    """``pi(dpsi) - (e^psi - 1) / (e^lambda - 1)``; lambda must be non-zero."""
    if np.any(np.asarray(lam) == 0.0):
        raise UrnValidationError("implicit residual", ["lambda must be non-zero"])
    return u(dpsi) - _ratio(lam, psi)


def bernoulli_cgf(p: float, lam):
    """``log(1 - p + p e^lambda)``, the CGF of the constant urn."""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.logaddexp(np.log1p(-p), lam + np.log(p))
    return float(out) if out.ndim == 0 else out


# -- closed form for linear urns ------------------------------------------------

def _node_coordinates(x1, x2, da, db, one_minus_x1, one_minus_x2):
    """``t`` and ``1 - t`` at quadrature nodes, each taken from the nearer endpoint."""
    near_left = da <= db
    t = np.where(near_left, x1 + da, x2 - db)
    comp = np.where(near_left, one_minus_x1 - da, one_minus_x2 + db)
    return t, comp


def _beta_integral(alpha, beta, x1, x2, one_minus_x1=None, one_minus_x2=None, rtol=1e-14) -> float:
    c1 = 1.0 - x1 if one_minus_x1 is None else one_minus_x1
    c2 = 1.0 - x2 if one_minus_x2 is None else one_minus_x2

    def integrand(x, da, db):
        t, comp = _node_coordinates(x1, x2, da, db, c1, c2)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.exp((alpha - 1.0) * np.log(comp) + (beta - 1.0) * np.log(t))

    res = tanh_sinh(integrand, x1, x2, rtol=rtol, max_level=12)
    if not math.isfinite(res.value):
        raise NumericalError(f"incomplete beta B({alpha}, {beta}; {x1}, {x2}) is not finite")
    if not res.converged and res.error > 1e-9 * abs(res.value):
        warnings.warn(f"incomplete beta quadrature error {res.error:.2e}", RuntimeWarning, stacklevel=3)
    return res.value


def incomplete_beta(alpha: float, beta: float, x1: float, x2: float) -> float:
    """``B(alpha, beta; x1, x2)``: integral over [x1, x2] of ``(1 - t)^(alpha-1) t^(beta-1)``."""
    if not 0.0 <= x1 <= x2 <= 1.0:
        raise UrnValidationError("incomplete beta limits", [f"need 0 <= x1 <= x2 <= 1, got {x1}, {x2}"])
    problems = []
    if x1 == 0.0 and beta <= 0.0:
        problems.append(f"t^(beta-1) is not integrable at 0 (beta={beta})")
    if x2 == 1.0 and alpha <= 0.0:
        problems.append(f"(1-t)^(alpha-1) is not integrable at 1 (alpha={alpha})")
    if problems:
        raise UrnValidationError("divergent incomplete beta", problems)
    if x1 == x2:
        return 0.0
    return _beta_integral(alpha, beta, x1, x2)


def _linear_positive(a: float, b: float, lam: float) -> tuple[float, float]:
    """``psi`` and ``psi'`` for ``lam > 0`` and the linear urn ``a + b s``.

    With ``z = 1 - e^-lam``, ``w = e^-lam``, ``alpha = a/b`` and ``beta = 1 - 1/b``,

        e^-psi = |1/b| z^(1/b) w^(-alpha) I,

    where ``I = B(alpha+1, beta-1; z, 1)`` for ``b > 0`` and
    ``B(alpha+1, beta-1; 0, z)`` for ``b < 0``.  This is the incomplete beta
    representation rewritten by one integration by parts so that no
    subtraction of nearly equal terms is left.
    """
    w = math.exp(-lam)
    z = -math.expm1(-lam)
    alpha = a / b
    beta = 1.0 - 1.0 / b
    if b > 0:
        # t = 1 - r maps [z, 1] to r in [0, w]; 1 - t = r exactly
        def integrand(x, da, db):
            r = np.where(da <= db, da, w - db)
            one_minus_r = np.where(da <= db, z + (w - r), z + db)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.exp(alpha * np.log(r) + (beta - 2.0) * np.log(one_minus_r))

        res = tanh_sinh(integrand, 0.0, w, rtol=1e-14, max_level=12)
        integral = res.value
        sign = -1.0
    else:
        integral = _beta_integral(alpha + 1.0, beta - 1.0, 0.0, z, 1.0, w)
        sign = 1.0
    if not integral > 0.0 or not math.isfinite(integral):
        raise NumericalError(f"linear CGF integral not positive at lambda={lam}")
    log_i = math.log(integral)
    log_g = -math.log(abs(b)) + math.log(z) / b + alpha * lam + log_i
    edge = math.exp(-(alpha + 1.0) * lam + (beta - 2.0) * math.log(z) - log_i)
    dlog_g = 1.0 / (b * math.expm1(lam)) + alpha + sign * edge
    return -log_g, -dlog_g


def _check_linear(a: float, b: float) -> None:
    problems = []
    if b == 0.0:
        problems.append("b = 0 is the constant urn: use bernoulli_cgf(a, lambda)")
    if not a > 0.0:
        problems.append(f"need a > 0, got {a}")
    if not a + b < 1.0:
        problems.append(f"need a + b < 1, got {a + b}")
    if problems:
        raise UrnValidationError("linear CGF parameters", problems)


def linear_cgf_with_slope(a: float, b: float, lam: float) -> tuple[float, float]:
    """``(psi(lam), psi'(lam))`` in closed form for the clamped linear urn ``a + b s``.

    Negative ``lam`` is reduced to the positive side of the colour-swapped
    urn ``(1 - a - b) + b s``.
    """
    _check_linear(a, b)
    if lam == 0.0:
        raise UrnValidationError("linear CGF", ["lambda must be non-zero"])
    if lam > 0:
        return _linear_positive(a, b, lam)
    psi, dpsi = _linear_positive(1.0 - a - b, b, -lam)
    return lam + psi, 1.0 - dpsi


def linear_cgf_closed_form(a: float, b: float, lam):
    """``psi(lam)`` for the linear urn; vectorised over ``lam``."""
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.array([linear_cgf_with_slope(a, b, float(x))[0] for x in arr])
    return float(out[0]) if np.ndim(lam) == 0 else out


def curvature_probe(a: float, b: float, ks=(2, 3, 4, 5), side: int = -1) -> np.ndarray:
    """Centred second differences of the closed-form ``psi`` at ``lambda = side * 10^-k``.

    The step is a tenth of ``|lambda|``.  They stay bounded when the second
    cumulant is finite and grow like ``|lambda|^(1/b - 2)`` when ``b > 1/2``.
    """
    out = []
    for k in ks:
        lam = side * 10.0 ** (-k)
        h = 0.1 * abs(lam)
        values = [linear_cgf_closed_form(a, b, lam + d) for d in (-h, 0.0, h)]
        out.append((values[0] - 2.0 * values[1] + values[2]) / h ** 2)
    return np.array(out)


# -- ODE solver -----------------------------------------------------------------

def swap_colours(u: UrnFunction) -> UrnFunction:
    """The urn ``1 - pi(1 - s)`` seen from the other colour."""
    return from_callable(lambda s: 1.0 - u(1.0 - np.asarray(s, dtype=float)), name=f"swap({u.label()})")


class TailInverse:
    """``pi^-1`` on a monotone tail, from a table bracket refined by Brent's method."""

    def __init__(self, u: UrnFunction, lo: float, hi: float):
        self.u = u
        self.lo, self.hi = lo, hi
        self.s = np.linspace(lo, hi, TABLE_SIZE)
        self.values = np.asarray(u(self.s), dtype=float)
        steps = np.diff(self.values)
        if np.all(np.abs(steps) <= MONOTONE_TOL):
            self.direction = 0
        elif np.all(steps >= -MONOTONE_TOL):
            self.direction = 1
        elif np.all(steps <= MONOTONE_TOL):
            self.direction = -1
        else:
            raise UrnValidationError("non-invertible tail", [f"pi is not monotone on [{lo:.6g}, {hi:.6g}]"])
        self._key = self.values if self.direction >= 0 else self.values[::-1]

    def __call__(self, r: float) -> float:
        if self.direction == 0:
            raise UrnValidationError("non-invertible tail", ["pi is constant on the tail"])
        vmin, vmax = self._key[0], self._key[-1]
        if r <= vmin:
            return self.s[0] if self.direction > 0 else self.s[-1]
        if r >= vmax:
            return self.s[-1] if self.direction > 0 else self.s[0]
        j = int(np.searchsorted(self._key, r))
        if self.direction > 0:
            a, b = self.s[j - 1], self.s[j]
        else:
            a, b = self.s[-j - 1], self.s[-j]
        ga, gb = self.u(a) - r, self.u(b) - r
        if ga == 0.0:
            return a
        if gb == 0.0:
            return b
        if ga * gb > 0:
            # flat stretch inside the table cell; any point with pi = r will do
            return a if abs(ga) < abs(gb) else b
        return brentq(lambda x: self.u(x) - r, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)


def _positive_tail(u: UrnFunction, analysis: ContactAnalysis) -> tuple[float, float]:
    return analysis.sup_contact, analysis.z_plus


def _solve_positive(u: UrnFunction, analysis: ContactAnalysis, lambdas: np.ndarray, eps: float) -> CgfCurve:
    lo, hi = _positive_tail(u, analysis)
    s_top = analysis.sup_contact
    if hi - lo <= 1e-12:
        return CgfCurve(1, lambdas, s_top * lambdas, np.full(lambdas.size, s_top), "degenerate",
                        notes=("tail has zero length: psi = lambda * sup C",))
    inverse = TailInverse(u, lo, hi)
    if inverse.direction == 0:
        p = float(u(0.5 * (lo + hi)))
        psi = bernoulli_cgf(p, lambdas)
        dpsi = p * np.exp(lambdas - psi)
        return CgfCurve(1, lambdas, psi, dpsi, "bernoulli", notes=("pi is constant on the tail",))

    def slope(lam, psi):
        return inverse(float(np.clip(_ratio(lam, psi), 0.0, 1.0)))

    def rhs(t, y):
        lam = math.exp(t)
        return [lam * slope(lam, y[0])]

    lam_max = float(lambdas[-1])
    if inverse.direction > 0:
        # forward integration amplifies errors like lambda^(1/pi'); integrate down from far out
        p1 = float(u(hi))
        dp1 = float((u(hi) - u(hi - 1e-6)) / 1e-6)
        far = lam_max + FAR_MARGIN * max(1.0, dp1 / max(p1, 1e-12))
        far = min(far, lam_max + 2000.0)
        with np.errstate(divide="ignore"):
            seed = far + math.log(p1 + (1.0 - p1) * math.exp(-far))
        t_span = (math.log(far), math.log(eps))
        y0 = [seed]
        direction = "backward"
    else:
        # one fixed-point pass of psi = log(1 + (e^lam - 1) pi(psi')) starting from psi' = sup C
        # the seed error is O(start^2) and decays forward, so start well below the first output
        start = min(eps, float(lambdas[0])) * 1e-2
        y0 = [bernoulli_cgf(float(u(s_top)), start)]
        t_span = (math.log(start), math.log(lam_max))
        direction = "forward"
    t_eval = np.log(lambdas)
    if direction == "backward":
        t_eval = t_eval[::-1]
    sol = solve_ivp(rhs, t_span, y0, method="DOP853", t_eval=t_eval, rtol=1e-12,
                    atol=min(1e-14, 1e-6 * float(lambdas[0])))
    if not sol.success:
        raise NumericalError(f"CGF integration failed: {sol.message}")
    psi = sol.y[0]
    if direction == "backward":
        psi = psi[::-1]
    if not np.all(np.isfinite(psi)):
        raise NumericalError("CGF integration blew up")
    dpsi = np.array([slope(l, p) for l, p in zip(lambdas, psi)])
    residual = np.abs(implicit_residual(u, lambdas, psi, dpsi))
    worst = float(residual.max())
    if worst > RESIDUAL_TOL:
        raise NumericalError(f"implicit relation residual {worst:.3g} exceeds {RESIDUAL_TOL}")
    return CgfCurve(1, lambdas, psi, dpsi, f"ode-{direction}", worst)


def lambda_grid(lambda_max: float, steps: int, eps: float) -> np.ndarray:
    """Log-spaced grid on [eps, lambda_max]."""
    return np.geomspace(eps, lambda_max, steps)


def solve_cgf(u: UrnFunction, analysis: ContactAnalysis | None = None, side: int = 1, lambda_max: float = 20.0,
              steps: int = 200, eps: float = 1e-4, lambdas=None) -> CgfCurve:
    """``psi`` on one side by integrating ``psi' = pi_tail^-1((e^psi - 1)/(e^lambda - 1))``.

    Increasing tails are integrated from far out back towards 0 (seeded with
    the ``lambda -> infinity`` asymptote) and decreasing tails forward from
    ``eps`` (seeded with the quadratic expansion at the extreme contact),
    since each direction damps the perturbations of the other.
    """
    if side not in (1, -1):
        raise UrnValidationError("CGF side", ["side must be +1 or -1"])
    grid = lambda_grid(lambda_max, steps, eps) if lambdas is None else np.sort(np.abs(np.asarray(lambdas, float)))
    eps = min(eps, float(grid[0]))
    if side == 1:
        return _solve_positive(u, analysis or find_contacts(u), grid, eps)
    swapped = swap_colours(u)
    curve = _solve_positive(swapped, find_contacts(swapped), grid, eps)
    lam = -grid[::-1]
    psi = lam + curve.psi[::-1]
    dpsi = 1.0 - curve.dpsi[::-1]
    return CgfCurve(-1, lam, psi, dpsi, curve.method, curve.max_residual, curve.notes)


def boundary_gaps(curve: CgfCurve, analysis: ContactAnalysis) -> tuple[float, float]:
    """Distances of ``psi'`` at the smallest and largest ``|lambda|`` from their limits."""
    if curve.side > 0:
        near, far = analysis.sup_contact, analysis.z_plus
        return abs(curve.dpsi[0] - near), abs(curve.dpsi[-1] - far)
    near, far = analysis.inf_contact, analysis.z_minus
    return abs(curve.dpsi[-1] - near), abs(curve.dpsi[0] - far)


# -- conjugates -----------------------------------------------------------------

def _curve_min(curve: CgfCurve, s: float) -> float:
    lam = np.concatenate([[0.0], curve.lambdas]) if curve.side > 0 else np.concatenate([curve.lambdas, [0.0]])
    psi = np.concatenate([[0.0], curve.psi]) if curve.side > 0 else np.concatenate([curve.psi, [0.0]])
    values = psi - lam * s
    k = int(np.argmin(values))
    lo, hi = max(k - 1, 0), min(k + 1, lam.size - 1)
    if lo == hi:
        return float(values[k])
    dpsi_all = np.concatenate([[curve.dpsi[0]], curve.dpsi]) if curve.side > 0 else \
        np.concatenate([curve.dpsi, [curve.dpsi[-1]]])
    spline = CubicHermiteSpline(lam[lo:hi + 1], psi[lo:hi + 1], dpsi_all[lo:hi + 1])
    res = minimize_scalar(lambda x: float(spline(x)) - x * s, bounds=(lam[lo], lam[hi]), method="bounded",
                          options={"xatol": 1e-13})
    return float(min(res.fun, values[k]))


def legendre_phi(curves, s, contact_range: tuple[float, float] | None = None) -> np.ndarray:
    """``inf_lambda {psi(lambda) - lambda s}`` over the sampled curves (and ``lambda = 0``).

    Between neighbouring samples the minimum is refined on the cubic Hermite
    interpolant.  ``contact_range`` pins the value 0 on [inf C, sup C].
    """
    if isinstance(curves, CgfCurve):
        curves = (curves,)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(s_arr.size)
    for j, x in enumerate(s_arr):
        if contact_range is not None and contact_range[0] <= x <= contact_range[1]:
            out[j] = 0.0
            continue
        out[j] = min(0.0, *(_curve_min(c, x) for c in curves))
    return float(out[0]) if np.ndim(s) == 0 else out


def legendre_psi(s_grid: np.ndarray, phi: np.ndarray, lam) -> np.ndarray:
    """``sup_s {phi(s) + lambda s}`` over a sampled rate function (the inverse transform)."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    finite = np.isfinite(phi)
    out = np.max(phi[finite][None, :] + lam_arr[:, None] * s_grid[finite][None, :], axis=1)
    return float(out[0]) if np.ndim(lam) == 0 else out


def linear_conjugate(a: float, b: float, s: float) -> tuple[float, float]:
    """``(phi(s), lambda*(s))`` for the linear urn by solving ``psi'(lambda) = s`` on the closed form."""
    _check_linear(a, b)
    s0 = a / (1.0 - b)
    if s == s0:
        return 0.0, 0.0
    # the end points are reached only as lambda -> +-inf
    if s == 1.0:
        return math.log(a + b), math.inf
    if s == 0.0:
        return math.log1p(-a), -math.inf
    side = 1.0 if s > s0 else -1.0

    def gap(lam):
        return linear_cgf_with_slope(a, b, lam)[1] - s

    # below |lambda| ~ 1e-7 the closed-form slope loses digits to cancellation; targets that
    # close to s0 have |phi| below 1e-13 anyway
    lo = side * 1e-7
    hi = side * 1.0
    while gap(hi) * side < 0:
        hi *= 2.0
        if abs(hi) > 700:
            raise NumericalError(f"s={s} is beyond the reach of the linear CGF")
    if gap(lo) * side > 0:
        lam = lo * (s - s0) / (linear_cgf_with_slope(a, b, lo)[1] - s0)
    else:
        lam = brentq(gap, min(lo, hi), max(lo, hi), xtol=1e-15, rtol=1e-15, maxiter=300)
    psi = linear_cgf_with_slope(a, b, lam)[0]
    return psi - lam * s, lam


# -- rate function --------------------------------------------------------------

@dataclass(frozen=True)
class RateValue:
    s: float
    value: float
    method: str
    uncertainty: float = 0.0


def _finite_n_estimate(u: UrnFunction, s: float, sizes=(1000, 2000, 4000)) -> tuple[float, float]:
    """Extrapolate ``phi_n(s)`` with the model ``phi + A/n + B log(n)/n``."""
    values = np.array([phi_n(terminal_distribution(u, n), s) for n in sizes])
    if not np.all(np.isfinite(values)):
        return -math.inf, 0.0
    n = np.array(sizes, dtype=float)
    design = np.column_stack([np.ones(3), 1.0 / n, np.log(n) / n])
    coef = np.linalg.solve(design, values)
    plain = 2.0 * values[-1] - values[-2]  # first-order Richardson in 1/n
    return float(coef[0]), float(abs(coef[0] - plain))


def _tail_curve(u: UrnFunction, analysis: ContactAnalysis, side: int, target: float,
                lambda_max: float) -> tuple[CgfCurve, bool]:
    """Solve one side, enlarging the lambda range until ``psi'`` passes ``target``."""
    lam_max = lambda_max
    for _ in range(6):
        curve = solve_cgf(u, analysis, side, lam_max, steps=400)
        reach = curve.dpsi[-1] if side > 0 else curve.dpsi[0]
        if (reach - target) * side >= 0 or curve.method in ("degenerate", "bernoulli"):
            return curve, True
        lam_max *= 4.0
    return curve, False


def rate_phi_curve(u: UrnFunction, s_grid, analysis: ContactAnalysis | None = None,
                   lambda_max: float = 40.0) -> list[RateValue]:
    """``rate_phi_detail`` on a grid of targets, solving each tail once."""
    analysis = analysis or find_contacts(u)
    s_arr = np.asarray(s_grid, dtype=float)
    out: list[RateValue | None] = [None] * s_arr.size
    tails = {1: [], -1: []}
    for j, s in enumerate(s_arr):
        s = float(s)
        if analysis.inf_contact <= s <= analysis.sup_contact:
            out[j] = RateValue(s, 0.0, "contact")
        elif s < analysis.z_minus or s > analysis.z_plus:
            out[j] = RateValue(s, -math.inf, "unreachable")
        elif s == analysis.z_plus:
            with np.errstate(divide="ignore"):
                out[j] = RateValue(s, float(np.log(u(s))), "endpoint")
        elif s == analysis.z_minus:
            with np.errstate(divide="ignore"):
                out[j] = RateValue(s, float(np.log1p(-u(s))), "endpoint")
        else:
            tails[1 if s > analysis.sup_contact else -1].append(j)
    for side, idx in tails.items():
        if not idx:
            continue
        targets = s_arr[idx]
        target = float(targets.max() if side > 0 else targets.min())
        try:
            curve, reached = _tail_curve(u, analysis, side, target, lambda_max)
        except (UrnValidationError, NumericalError) as exc:
            for j in idx:
                value, spread = _finite_n_estimate(u, float(s_arr[j]))
                out[j] = RateValue(float(s_arr[j]), value, f"finite-n ({exc.args[0]})", spread)
            continue
        reach = curve.dpsi[-1] if side > 0 else curve.dpsi[0]
        for j in idx:
            s = float(s_arr[j])
            beyond = (reach - s) * side < 0
            method = "legendre-truncated" if beyond and not reached else "legendre"
            out[j] = RateValue(s, legendre_phi(curve, s), method, 0.0)
    return out


def rate_phi_detail(u: UrnFunction, s: float, analysis: ContactAnalysis | None = None,
                    lambda_max: float = 40.0) -> RateValue:
    """``rate_phi`` together with the method used and an uncertainty for the finite-n fallback."""
    return rate_phi_curve(u, [s], analysis, lambda_max)[0]


def rate_phi(u: UrnFunction, s: float, analysis: ContactAnalysis | None = None) -> float:
    """Terminal rate function ``phi(s) = lim n^-1 log P(X_n = floor(s n))`` in [-inf, 0]."""
    return rate_phi_detail(u, s, analysis).value
