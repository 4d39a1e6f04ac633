"""Urn functions: construction, evaluation, ingestion and transformations.

An urn function maps the current black-ball fraction ``s`` to the probability
of adding a black ball at the next step.  Every :class:`UrnFunction` is an
immutable value wrapping a vectorised evaluator plus a serialisable
description (``kind`` and ``params``).
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

import numpy as np
import yaml
from scipy.interpolate import PchipInterpolator

from .errors import UrnSpecError, UrnValidationError

DOMAIN_TOL = 1e-12
RANGE_TOL = 1e-12
VALIDATION_GRID = 100_001

KINDS = ("constant", "linear", "polynomial", "majority", "piecewise", "tabulated", "callable")
MODULUS_CLASSES = ("lipschitz", "hoelder", "declared_u", "unknown")


@dataclass(frozen=True)
class RegularityInfo:
    modulus_class: str = "unknown"
    constant: float | None = None
    exponent: float = 1.0
    continuity_checked: bool = False

    def __post_init__(self):
        if self.modulus_class not in MODULUS_CLASSES:
            raise UrnValidationError("bad regularity", [f"unknown modulus class {self.modulus_class!r}"])
        if self.modulus_class == "hoelder" and not (0.0 < self.exponent <= 1.0):
            raise UrnValidationError("bad regularity", ["Hoelder exponent must lie in (0, 1]"])


@dataclass(frozen=True, eq=False)
class UrnFunction:
    """Immutable urn function ``pi: [0, 1] -> [0, 1]``.

    Calling the object evaluates without a domain check (fast path used by the
    numerical modules); :func:`evaluate` adds the domain check.
    """

    kind: str
    params: Mapping[str, Any]
    regularity: RegularityInfo
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = ""

    def __call__(self, s):
        if np.ndim(s) == 0:
            return float(self.fn(np.asarray(s, dtype=float)))
        return self.fn(np.asarray(s, dtype=float))

    def complement(self, s):
        """1 - pi(s)."""
        return 1.0 - self(s)

    def to_spec(self) -> dict:
        """Serialisable description; callable-based pieces cannot be exported."""
        spec = {"kind": self.kind}
        for key, value in self.params.items():
            if key.startswith("_"):
                continue
            spec[key] = _plain(value)
        return spec

    def label(self) -> str:
        return self.name or self.kind


def _plain(value):
    if isinstance(value, UrnFunction):
        return value.to_spec()
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if callable(value):
        return "<callable>"
    return value


def _build(kind, params, fn, regularity=None, name="", validate=True) -> UrnFunction:
    u = UrnFunction(kind, MappingProxyType(dict(params)), regularity or RegularityInfo(), fn, name)
    if validate:
        validate_range(u)
    return u


def validate_range(u: UrnFunction, grid_n: int = VALIDATION_GRID) -> None:
    s = np.linspace(0.0, 1.0, grid_n)
    values = np.asarray(u.fn(s), dtype=float)
    problems = []
    if values.shape != s.shape:
        problems.append("evaluator does not preserve array shape")
    else:
        bad = ~np.isfinite(values)
        if bad.any():
            problems.append(f"non-finite value at s={s[bad][0]:.6g}")
        low = values < -RANGE_TOL
        high = values > 1.0 + RANGE_TOL
        if low.any():
            problems.append(f"value {values[low].min():.6g} < 0 at s={s[low][0]:.6g}")
        if high.any():
            problems.append(f"value {values[high].max():.6g} > 1 at s={s[high][0]:.6g}")
    if problems:
        raise UrnValidationError("urn function leaves [0, 1]", problems)


def evaluate(u: UrnFunction, s):
    """pi(s) with a domain check; ``s`` may be a scalar or an array."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < -DOMAIN_TOL) or np.any(arr > 1.0 + DOMAIN_TOL) or np.any(np.isnan(arr)):
        raise UrnValidationError("domain error", [f"s must lie in [0, 1], got {s!r}"])
    return u(np.clip(arr, 0.0, 1.0)) if arr.ndim else u(float(np.clip(arr, 0.0, 1.0)))


# --- constructors -----------------------------------------------------------


def constant(p: float) -> UrnFunction:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise UrnValidationError("constant urn", [f"p={p} outside [0, 1]"])
    return _build(
        "constant",
        {"p": p},
        lambda s: np.full(np.shape(s), p),
        RegularityInfo("lipschitz", 0.0),
        name=f"constant({p:g})",
    )


def linear(a: float, b: float) -> UrnFunction:
    """Clamped affine urn ``min(1, max(0, a + b*s))``.

    ``a`` is the unclamped intercept and may exceed 1 (the subtractive
    Bagchi-Pal urn has ``a = 2``).
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UrnValidationError("linear urn", ["a and b must be finite"])

    def fn(s):
        return np.clip(a + b * s, 0.0, 1.0)

    return _build("linear", {"a": a, "b": b}, fn, RegularityInfo("lipschitz", abs(b)), name=f"linear({a:g},{b:g})")


def identity() -> UrnFunction:
    return polynomial([0.0, 1.0], name="identity")


def polynomial(coefficients: Sequence[float], name: str = "") -> UrnFunction:
    coef = np.asarray(coefficients, dtype=float)
    if coef.ndim != 1 or coef.size == 0:
        raise UrnValidationError("polynomial urn", ["coefficients must be a non-empty list"])
    deriv = np.polynomial.polynomial.polyder(coef) if coef.size > 1 else np.zeros(1)
    grid = np.linspace(0.0, 1.0, 10_001)
    lip = float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, deriv))))

    def fn(s):
        return np.clip(np.polynomial.polynomial.polyval(s, coef), 0.0, 1.0)

    u = UrnFunction("polynomial", MappingProxyType({"coefficients": coef.tolist()}),
                    RegularityInfo("lipschitz", lip), fn, name or "polynomial")
    raw = np.polynomial.polynomial.polyval(np.linspace(0.0, 1.0, VALIDATION_GRID), coef)
    if raw.min() < -RANGE_TOL or raw.max() > 1.0 + RANGE_TOL:
        raise UrnValidationError("polynomial urn", [f"values span [{raw.min():.6g}, {raw.max():.6g}]"])
    return u


def majority_probability(z: int, s):
    """Probability that a sample of ``z`` draws (``z`` odd) has a black majority."""
    s = np.asarray(s, dtype=float)
    total = np.zeros_like(s)
    for k in range((z + 1) // 2, z + 1):
        total = total + math.comb(z, k) * s**k * (1.0 - s) ** (z - k)
    return total


def majority(z: int = 3, p: float = 0.0) -> UrnFunction:
    """Sampling urn: draw ``z`` balls; follow the majority colour with probability ``1 - p``.

    ``p = 0`` is the pure majority rule; for ``z = 3`` it gives ``3s^2 - 2s^3``.
    """
    if int(z) != z or z < 1 or z % 2 == 0:
        raise UrnValidationError("majority urn", [f"z must be an odd integer >= 1, got {z}"])
    z = int(z)
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise UrnValidationError("majority urn", [f"p={p} outside [0, 1]"])

    def fn(s):
        sigma = majority_probability(z, s)
        return np.clip(p + (1.0 - 2.0 * p) * sigma, 0.0, 1.0)

    grid = np.linspace(0.0, 1.0, 10_001)
    lip = float(np.max(np.abs(np.gradient(fn(grid), grid))))
    return _build("majority", {"z": z, "p": p}, fn, RegularityInfo("lipschitz", lip), name=f"majority(z={z},p={p:g})")


def piecewise(breakpoints: Sequence[float], pieces: Sequence, regularity: RegularityInfo | None = None,
              name: str = "piecewise") -> UrnFunction:
    """Piece ``j`` applies on ``[breakpoints[j], breakpoints[j+1])``; the last piece includes 1.

    Pieces are urn functions or plain vectorised callables.
    """
    bp = np.asarray(breakpoints, dtype=float)
    problems = []
    if bp.ndim != 1 or bp.size < 2:
        problems.append("need at least two breakpoints")
    elif bp[0] != 0.0 or bp[-1] != 1.0:
        problems.append("breakpoints must start at 0 and end at 1")
    elif np.any(np.diff(bp) <= 0):
        problems.append("breakpoints must be strictly increasing")
    if len(pieces) != max(bp.size - 1, 0):
        problems.append(f"expected {bp.size - 1} pieces, got {len(pieces)}")
    if problems:
        raise UrnValidationError("piecewise urn", problems)
    fns = [p if isinstance(p, UrnFunction) else p for p in pieces]
    inner = bp[1:-1]

    def fn(s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(inner, s, side="right")
        out = np.empty_like(s)
        for j, piece in enumerate(fns):
            mask = idx == j
            if np.any(mask):
                out[mask] = piece(s[mask]) if isinstance(piece, UrnFunction) else np.asarray(piece(s[mask]), float)
        return out

    return _build("piecewise", {"breakpoints": bp.tolist(), "pieces": list(pieces)}, fn, regularity, name=name)


def tabulated(points: Sequence[Sequence[float]], rule: str = "linear", extend: bool = False) -> UrnFunction:
    return from_table(points, rule, extend)


def from_table(points: Sequence[Sequence[float]], rule: str = "linear", extend: bool = False) -> UrnFunction:
    """Urn function interpolating sampled values ``(m_i, pi_i)``.

    ``rule`` is ``"linear"`` or ``"monotone_cubic"`` (PCHIP, which never
    overshoots neighbouring data).  Without ``extend`` the table must cover
    both endpoints; with it the end values are continued as constants.
    """
    arr = np.asarray(points, dtype=float)
    problems = []
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise UrnValidationError("tabulated urn", ["points must be a list of [m, pi] pairs"])
    if arr.shape[0] < 2:
        problems.append("too few points (need at least 2)")
    m, v = arr[:, 0], arr[:, 1]
    if np.any(np.diff(m) <= 0):
        problems.append("m values must be strictly increasing")
    if np.any((v < 0) | (v > 1)) or not np.all(np.isfinite(v)):
        problems.append("values must lie in [0, 1]")
    if rule not in ("linear", "monotone_cubic"):
        problems.append(f"unknown interpolation rule {rule!r}")
    if not problems and (m[0] != 0.0 or m[-1] != 1.0):
        if extend:
            if m[0] > 0.0:
                m, v = np.r_[0.0, m], np.r_[v[0], v]
            if m[-1] < 1.0:
                m, v = np.r_[m, 1.0], np.r_[v, v[-1]]
        else:
            problems.append("table must include m=0 and m=1 (or pass extend=True)")
    if np.any((m < 0) | (m > 1)):
        problems.append("m values must lie in [0, 1]")
    if problems:
        raise UrnValidationError("tabulated urn", problems)

    if rule == "linear":
        def fn(s):
            return np.interp(s, m, v)

        slope = float(np.max(np.abs(np.diff(v) / np.diff(m))))
        reg = RegularityInfo("lipschitz", slope)
    else:
        interp = PchipInterpolator(m, v, extrapolate=True)

        def fn(s):
            return np.clip(interp(s), 0.0, 1.0)

        reg = RegularityInfo("unknown")
    table = np.column_stack([m, v]).tolist()
    return _build("tabulated", {"points": table, "rule": rule}, fn, reg, name=f"tabulated({len(table)} pts)")


def from_callable(fn: Callable, name: str = "callable", regularity: RegularityInfo | None = None) -> UrnFunction:
    """Wrap an arbitrary vectorised function; range validated on a grid."""
    return _build("callable", {"name": name}, lambda s: np.asarray(fn(s), dtype=float), regularity, name=name)


def check_regularity(u: UrnFunction, resolution: float = 1e-4, jump_limit: float = 0.1) -> UrnFunction:
    """Grid falsifier for the declared modulus of continuity.

    Returns a copy with ``continuity_checked=True`` or raises when the grid
    shows a violation by more than a factor of two.  Without a declared
    modulus only gross jumps are flagged.
    """
    n = int(round(1.0 / resolution))
    s = np.linspace(0.0, 1.0, n + 1)
    jumps = np.abs(np.diff(u(s)))
    reg = u.regularity
    if reg.modulus_class in ("lipschitz", "hoelder") and reg.constant is not None:
        exponent = 1.0 if reg.modulus_class == "lipschitz" else reg.exponent
        bound = 2.0 * reg.constant * resolution**exponent + 1e-12
        worst = float(jumps.max())
        if worst > bound:
            raise UrnValidationError(
                "declared modulus violated",
                [f"increment {worst:.3g} exceeds 2*C*h^alpha = {bound:.3g}"],
            )
    elif float(jumps.max()) > jump_limit:
        raise UrnValidationError("apparent discontinuity", [f"jump {jumps.max():.3g} at resolution {resolution:g}"])
    return replace(u, regularity=replace(reg, continuity_checked=True))


# --- named urns used throughout the examples ---------------------------------


def arcsin_urn() -> UrnFunction:
    """Urn whose crossing integral on (1/4, 1/2) is ``2 arcsin(sqrt(4z - 1))``.

    Signs: pi > s on (0, 1/2) and pi < s on (1/2, 1); contacts at 1/4
    (touching from above), 1/2 (stable crossing) and 3/4 (touching from below).
    """

    def p0(s):
        return s + np.sqrt(np.maximum(0.25 - s, 0.0))

    def p1(s):
        return s + np.sqrt(np.maximum((s - 0.25) * (0.5 - s), 0.0))

    def p2(s):
        return s - np.sqrt(np.maximum((s - 0.5) * (0.75 - s), 0.0))

    def p3(s):
        return s - np.sqrt(np.maximum(s - 0.75, 0.0))

    return piecewise([0.0, 0.25, 0.5, 0.75, 1.0], [p0, p1, p2, p3],
                     RegularityInfo("hoelder", 1.0, 0.5), name="arcsin")


def subtractive_urn() -> UrnFunction:
    """Balanced subtractive urn with reinforcement [[-1, 2], [2, -1]]."""
    return bagchi_pal_to_linear(BagchiPalMatrix(-1, 2, 2, -1)).urn()


# --- Bagchi-Pal correspondence ---------------------------------------------


@dataclass(frozen=True)
class BagchiPalMatrix:
    a11: int
    a12: int
    a21: int
    a22: int
    B0: int = 1
    W0: int = 1

    def __post_init__(self):
        problems = []
        for name in ("a11", "a12", "a21", "a22", "B0", "W0"):
            value = getattr(self, name)
            if int(value) != value:
                problems.append(f"{name} must be an integer")
        if self.B0 < 0 or self.W0 < 0:
            problems.append("initial ball counts must be non-negative")
        if self.a11 + self.a12 != self.a21 + self.a22:
            problems.append("unbalanced: a11 + a12 != a21 + a22")
        if problems:
            raise UrnValidationError("Bagchi-Pal matrix", problems)

    @property
    def M(self) -> int:
        return self.a11 + self.a12

    def tenability(self) -> list[str]:
        """Violated tenability conditions (empty when the urn can never get stuck).

        A colour that can be removed must be removed in multiples that divide
        its initial count and every addition of that colour.
        """
        issues = []
        if self.M <= 0:
            issues.append("M must be positive")
        if self.a12 < 0:
            issues.append("a12 must be non-negative")
        if self.a21 < 0:
            issues.append("a21 must be non-negative")
        if self.a11 < 0:
            d = -self.a11
            if self.B0 % d or self.a21 % d:
                issues.append("a11 < 0 requires B0 and a21 divisible by |a11|")
        if self.a22 < 0:
            d = -self.a22
            if self.W0 % d or self.a12 % d:
                issues.append("a22 < 0 requires W0 and a12 divisible by |a22|")
        return issues


@dataclass(frozen=True)
class LinearCorrespondence:
    """Linear urn equivalent to a balanced Bagchi-Pal urn.

    ``s0`` is ``None`` in the Polya case ``b = 1`` where every point is fixed.
    """

    s0: float | None
    b: float
    intercept: float
    M: int
    delta: int  # a11 + a22 - M, the increment of B per unit of X
    offset: int  # M - a22, the per-step drift of B
    m: float  # starting time (B0 + W0) / M
    x_start: float  # X at time m
    polya: bool

    def x_of(self, black: float, k: float) -> float:
        """Map a ball count ``B_k`` at time ``k`` to the urn counter ``X_k``."""
        return (black - self.offset * k) / self.delta

    def urn(self) -> UrnFunction:
        return linear(self.intercept, self.b)

    def exact(self) -> tuple[Fraction | None, Fraction]:
        """(s0, b) as exact rationals."""
        b = Fraction(self.delta, self.M)
        denom = self.M - self.delta  # 2M - a11 - a22
        return (None if self.polya else Fraction(self.offset, denom)), b


def bagchi_pal_to_linear(m: BagchiPalMatrix) -> LinearCorrespondence:
    M = m.M
    delta = m.a11 + m.a22 - M
    if delta == 0:
        raise UrnValidationError("degenerate Bagchi-Pal matrix", ["a11 + a22 - M = 0 (deterministic evolution)"])
    if M <= 0:
        raise UrnValidationError("Bagchi-Pal matrix", ["balance M must be positive"])
    b = delta / M  # (a11 + a22)/M - 1 without the rounding of the subtraction
    offset = M - m.a22
    intercept = offset / M
    denom = 2 * M - m.a11 - m.a22
    polya = denom == 0
    s0 = None if polya else offset / denom
    start = (m.B0 + m.W0) / M
    x_start = (m.B0 - offset * start) / delta
    return LinearCorrespondence(s0, b, intercept, M, delta, offset, start, x_start, polya)


def linear_to_bagchi_pal(s0: float, b: float, M: int, B0: int = 1, W0: int = 1, tol: float = 1e-9) -> BagchiPalMatrix:
    entries = [
        M * (b + s0 * (1.0 - b)),
        M * (1.0 - s0) * (1.0 - b),
        M * s0 * (1.0 - b),
        M * (1.0 - s0 * (1.0 - b)),
    ]
    rounded = [round(x) for x in entries]
    bad = [f"{name}={x:.12g}" for name, x, r in zip(("a11", "a12", "a21", "a22"), entries, rounded) if abs(x - r) > tol]
    if bad:
        raise UrnValidationError("non-integer reinforcement matrix", bad)
    matrix = BagchiPalMatrix(*(int(r) for r in rounded), B0=B0, W0=W0)
    issues = matrix.tenability()
    if issues:
        import warnings

        warnings.warn("untenable Bagchi-Pal urn: " + "; ".join(issues), stacklevel=2)
    return matrix


# --- inverse design -----------------------------------------------------------


def _derivative(f: Callable, s: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Richardson-extrapolated central differences; tiny one-sided steps at 0 and 1."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    interior = (s > 0.0) & (s < 1.0)
    si = s[interior]
    hl = np.minimum(h, 0.5 * np.minimum(si, 1.0 - si))

    def central(step):
        return (f(si + step) - f(si - step)) / (2.0 * step)

    out[interior] = (4.0 * central(hl / 2.0) - central(hl)) / 3.0
    end_h = 1e-12
    left = s == 0.0
    right = s == 1.0
    if left.any():
        out[left] = (f(np.array([end_h])) - f(np.array([0.0])))[0] / end_h
    if right.any():
        out[right] = (f(np.array([1.0])) - f(np.array([1.0 - end_h])))[0] / end_h
    return out


def _design_value(fs: np.ndarray, s: np.ndarray, df: np.ndarray) -> np.ndarray:
    """(e^{f - s f'} - 1) / (e^{-f'} - 1) with its limits for infinite slopes."""
    with np.errstate(all="ignore"):
        sdf = np.where(s == 0.0, 0.0, s * df)
        pos = df >= 0
        # f' >= 0: direct form; f' = +inf gives 1 - e^f.
        direct = np.expm1(fs - sdf) / np.expm1(-df)
        # f' < 0: multiply through by e^{f'} to keep everything bounded.
        tail = np.where(s == 1.0, 0.0, (1.0 - s) * df)
        scaled = (np.exp(fs + tail) - np.exp(df)) / (-np.expm1(df))
        return np.where(pos, direct, scaled)


@dataclass(frozen=True)
class DesignReport:
    f0: float
    f1: float
    pi0: float
    pi1: float
    gap0: float  # |f(0) - log(1 - pi_f(0))|
    gap1: float  # |f(1) - log pi_f(1)|
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.gap0 <= self.tolerance and self.gap1 <= self.tolerance)


def inverse_design(
    f: Callable,
    grid: int = 1001,
    df: Callable | None = None,
    removable_tol: float = 1e-5,
    consistency_tol: float = 1e-6,
    strict: bool = True,
) -> UrnFunction:
    """Urn function whose terminal rate function is the concave target ``f``.

    Values ``pi_f(s) = (e^{f - s f'} - 1) / (e^{-f'} - 1)`` are tabulated on a
    uniform grid with ``grid`` nodes.  Where ``f'`` vanishes the quotient is
    0/0 and the value is the average of the evaluations at ``s +/- 1e-6``.
    The endpoint conditions ``f(0) = log(1 - pi_f(0))`` and
    ``f(1) = log pi_f(1)`` are checked; the report is stored under
    ``params["report"]`` and a failure raises when ``strict``.
    """
    s = np.linspace(0.0, 1.0, int(grid))
    fv = np.asarray(f(s), dtype=float)
    problems = []
    if not np.all(np.isfinite(fv)):
        problems.append("f must be finite on [0, 1]")
    elif fv.max() > 1e-12:
        problems.append(f"f must be <= 0 (max {fv.max():.3g})")
    else:
        second = fv[:-2] - 2.0 * fv[1:-1] + fv[2:]
        if second.max() > 1e-9:
            problems.append(f"f is not concave (second difference {second.max():.3g})")
    if problems:
        raise UrnValidationError("inverse design input", problems)

    deriv = (lambda x: np.asarray(df(x), dtype=float)) if df is not None else (lambda x: _derivative(f, x))
    with np.errstate(all="ignore"):
        dv = deriv(s)
    pi = _design_value(fv, s, dv)
    flat = (np.abs(dv) < removable_tol) & (s > 0.0) & (s < 1.0)
    if flat.any():
        sf = s[flat]
        values = []
        for shift in (-1e-6, 1e-6):
            x = sf + shift
            values.append(_design_value(np.asarray(f(x), float), x, deriv(x)))
        pi[flat] = 0.5 * (values[0] + values[1])

    def log_or_inf(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.log(x)) if np.isfinite(x) else float("nan")

    gap0 = abs(fv[0] - log_or_inf(1.0 - pi[0]))
    gap1 = abs(fv[-1] - log_or_inf(pi[-1]))
    report = DesignReport(float(fv[0]), float(fv[-1]), float(pi[0]), float(pi[-1]),
                          float(gap0) if np.isfinite(gap0) else float("inf"),
                          float(gap1) if np.isfinite(gap1) else float("inf"), consistency_tol)
    if strict and not report.ok:
        raise UrnValidationError(
            "inverse design endpoint consistency failed",
            [f"|f(0) - log(1 - pi_f(0))| = {report.gap0:.3g}", f"|f(1) - log pi_f(1)| = {report.gap1:.3g}"],
        )
    if not np.all(np.isfinite(pi)) or pi.min() < -1e-9 or pi.max() > 1.0 + 1e-9:
        raise UrnValidationError("inverse design output", ["resulting values outside [0, 1]"])
    urn = from_table(np.column_stack([s, np.clip(pi, 0.0, 1.0)]), "linear")
    params = dict(urn.params)
    params["_report"] = report
    params["source"] = "inverse_design"
    return replace(urn, params=MappingProxyType(params), name="inverse_design")


def design_report(u: UrnFunction) -> DesignReport | None:
    return u.params.get("_report")


# --- specification documents -------------------------------------------------

_SHORTHAND = re.compile(r"^(?P<name>[a-z_]+)(?P<z>\d+)?(?::(?P<args>.*))?$")


def _yaml_load(text: str):
    fixed = text
    stripped = text.strip()
    if stripped.startswith("{") and "\n" not in stripped:
        # Accept compact flow mappings such as {kind:linear,a:0.3}.
        fixed = re.sub(r":(?=[^\s/])", ": ", stripped)
    try:
        return yaml.safe_load(fixed)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
        raise UrnSpecError(f"cannot parse urn specification{where}: {getattr(exc, 'problem', exc)}") from None


def _shorthand(text: str) -> dict | None:
    match = _SHORTHAND.match(text.strip())
    if not match:
        return None
    name, z, args = match.group("name"), match.group("z"), match.group("args")
    values = []
    if args:
        try:
            values = [float(x) for x in args.split(",")]
        except ValueError:
            raise UrnSpecError(f"bad numeric arguments in {text!r}") from None
    if name == "majority":
        p = values[0] if values else 0.0
        return {"kind": "majority", "z": int(z or 3), "p": p}
    if z is not None:
        return None
    if name == "identity" and not values:
        return {"kind": "polynomial", "coefficients": [0.0, 1.0]}
    if name == "constant" and len(values) == 1:
        return {"kind": "constant", "p": values[0]}
    if name == "linear" and len(values) == 2:
        return {"kind": "linear", "a": values[0], "b": values[1]}
    if name in ("arcsin", "subtractive") and not values:
        return {"kind": name}
    return None


_FIELDS = {
    "constant": {"p": float},
    "linear": {"a": float, "b": float},
    "polynomial": {"coefficients": list},
    "majority": {"z": int, "p": float},
    "piecewise": {"breakpoints": list, "pieces": list},
    "tabulated": {"points": list},
}
_OPTIONAL = {"tabulated": {"rule": str, "extend": bool}, "majority": {}, "piecewise": {"name": str}}


def _coerce(kind: str, key: str, value, expected, path: str):
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise UrnSpecError(f"field {path}{key}: expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise UrnSpecError(f"field {path}{key}: expected an integer, got {value!r}")
        return int(value)
    if not isinstance(value, expected):
        raise UrnSpecError(f"field {path}{key}: expected {expected.__name__}, got {type(value).__name__}")
    return value


def from_dict(doc: Mapping, path: str = "") -> UrnFunction:
    if not isinstance(doc, Mapping):
        raise UrnSpecError(f"{path or 'document'}: expected a mapping with a 'kind' field")
    kind = doc.get("kind")
    if kind == "arcsin":
        return arcsin_urn()
    if kind == "subtractive":
        return subtractive_urn()
    if kind == "identity":
        return identity()
    if kind not in _FIELDS:
        raise UrnSpecError(f"field {path}kind: unknown kind {kind!r} (expected one of {', '.join(_FIELDS)})")
    required = _FIELDS[kind]
    optional = _OPTIONAL.get(kind, {})
    extra = set(doc) - set(required) - set(optional) - {"kind"}
    if extra:
        raise UrnSpecError(f"{path or 'document'}: unknown field(s) {sorted(extra)} for kind {kind}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise UrnSpecError(f"{path or 'document'}: missing field(s) {missing} for kind {kind}")
    args = {k: _coerce(kind, k, doc[k], t, path) for k, t in required.items()}
    args.update({k: _coerce(kind, k, doc[k], t, path) for k, t in optional.items() if k in doc})
    if kind == "constant":
        return constant(args["p"])
    if kind == "linear":
        return linear(args["a"], args["b"])
    if kind == "polynomial":
        return polynomial(args["coefficients"])
    if kind == "majority":
        return majority(args["z"], args.get("p", 0.0))
    if kind == "tabulated":
        return from_table(args["points"], args.get("rule", "linear"), args.get("extend", False))
    pieces = [from_dict(piece, f"{path}pieces[{i}].") for i, piece in enumerate(args["pieces"])]
    return piecewise(args["breakpoints"], pieces, name=args.get("name", "piecewise"))


def from_spec(text) -> UrnFunction:
    """Build an urn function from a specification document.

    Accepts a mapping, a JSON or YAML document, or a shorthand such as
    ``majority3``, ``constant:0.5``, ``linear:0.3,0.2``, ``identity``,
    ``arcsin`` or ``subtractive``.
    """
    if isinstance(text, Mapping):
        return from_dict(text)
    if not isinstance(text, str):
        raise UrnSpecError(f"unsupported specification type {type(text).__name__}")
    short = _shorthand(text)
    if short is not None:
        return from_dict(short)
    try:
        doc = json.loads(text)
    except ValueError:
        doc = _yaml_load(text)
    if isinstance(doc, str):
        raise UrnSpecError(f"unrecognised urn specification {text!r}")
    return from_dict(doc)


def load_urn(source: str) -> UrnFunction:
    """``source`` is a path to a specification file or an inline specification."""
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as handle:
            return from_spec(handle.read())
    return from_spec(source)
