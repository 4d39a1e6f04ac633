"""Contact set of an urn function and the structure it induces on [0, 1].

A contact is a point where ``pi(s) = s``.  Isolated contacts and the end
points of plateaus (intervals where ``pi`` coincides with the diagonal) split
[0, 1] into K intervals on which ``pi(s) - s`` keeps a constant sign.  The
intervals are numbered ``0..N`` from the left; the first and last may be empty
(a contact at 0 or 1), in which case their sign is +1 and -1 by convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .urn import UrnFunction, constant, piecewise

LABELS = {
    (1, -1): "downcrossing",
    (-1, 1): "upcrossing",
    (1, 1): "touchpoint+",
    (-1, -1): "touchpoint-",
}

WALL_TOL = 0.0  # walls are exact: clamped urns return exactly 0 or 1


@dataclass(frozen=True)
class ContactType:
    s: float
    alpha: int  # sign of pi - s just left of s
    beta: int  # sign of pi - s just right of s
    label: str
    origin: str  # "isolated", "plateau_start" or "plateau_end"


@dataclass(frozen=True)
class ContactAnalysis:
    isolated_contacts: tuple[float, ...]
    plateau_intervals: tuple[tuple[float, float], ...]
    boundary: tuple[float, ...]  # isolated contacts and plateau end points, sorted
    intervals: tuple[tuple[float, float], ...]  # K_0..K_N, possibly empty at the ends
    interval_signs: tuple[int, ...]
    contact_types: tuple[ContactType, ...]  # one per boundary point
    z_minus: float
    z_plus: float
    resolution_warning: bool = False
    eps_eq: float = 1e-10

    @property
    def k_intervals(self) -> list[tuple[float, float]]:
        """Non-empty K intervals (a sign-0 entry is the interior of a plateau)."""
        return [iv for iv in self.intervals if iv[1] > iv[0]]

    @property
    def signs(self) -> list[int]:
        return [a for iv, a in zip(self.intervals, self.interval_signs) if iv[1] > iv[0]]

    @property
    def inf_contact(self) -> float:
        return self.boundary[0]

    @property
    def sup_contact(self) -> float:
        return self.boundary[-1]

    def interval_index(self, s: float) -> int | None:
        """Index of the K interval containing ``s`` in its interior, if any."""
        for i, (lo, hi) in enumerate(self.intervals):
            if lo < s < hi:
                return i
            if i == 0 and lo == 0.0 and s == 0.0 and hi > 0.0:
                return 0
            if i == len(self.intervals) - 1 and hi == 1.0 and s == 1.0 and lo < 1.0:
                return i
        return None

    def emanation_point(self, i: int) -> float:
        """The unstable end of interval ``i``: inf K if a=+1, sup K if a=-1."""
        lo, hi = self.intervals[i]
        return lo if self.interval_signs[i] > 0 else hi

    def stable_end(self, i: int) -> float:
        lo, hi = self.intervals[i]
        return hi if self.interval_signs[i] > 0 else lo

    def to_dict(self) -> dict:
        return {
            "contacts": [
                {"s": c.s, "alpha": c.alpha, "beta": c.beta, "type": c.label, "origin": c.origin}
                for c in self.contact_types
            ],
            "isolated_contacts": list(self.isolated_contacts),
            "k_intervals": [
                {"index": i, "lo": lo, "hi": hi, "sign": a}
                for i, ((lo, hi), a) in enumerate(zip(self.intervals, self.interval_signs))
            ],
            "plateaus": [list(p) for p in self.plateau_intervals],
            "z_minus": self.z_minus,
            "z_plus": self.z_plus,
            "resolution_warning": self.resolution_warning,
        }


def _bisect_predicate(pred, inside: float, outside: float, iterations: int = 80) -> float:
    """Boundary of {pred} between a point where it holds and one where it fails."""
    for _ in range(iterations):
        mid = 0.5 * (inside + outside)
        if mid == inside or mid == outside:
            break
        if pred(mid):
            inside = mid
        else:
            outside = mid
    return inside


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs [start, end] (inclusive) of True entries."""
    if not mask.any():
        return []
    padded = np.r_[False, mask, False].astype(int)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def _sign_of_interval(g, lo: float, hi: float) -> int:
    probe = np.linspace(lo, hi, 11)[1:-1]
    values = g(probe)
    k = int(np.argmax(np.abs(values)))
    return int(np.sign(values[k]))


def find_contacts(u: UrnFunction, eps_eq: float = 1e-10, grid_n: int = 10_000) -> ContactAnalysis:
    """Locate contacts, plateaus and K intervals of ``u`` by a grid scan plus refinement."""

    def g(x):
        return u(x) - x

    s = np.linspace(0.0, 1.0, grid_n + 1)
    gv = g(s)
    zero = np.abs(gv) <= eps_eq
    plateaus: list[tuple[float, float]] = []
    isolated: list[float] = []
    warning = False

    def is_zero(x):
        return abs(g(x)) <= eps_eq

    for start, end in _runs(zero):
        if end - start >= 2:
            lo = s[start] if start == 0 else _bisect_predicate(is_zero, s[start], s[start - 1])
            hi = s[end] if end == grid_n else _bisect_predicate(is_zero, s[end], s[end + 1])
            plateaus.append((float(lo), float(hi)))
        else:
            run = np.arange(start, end + 1)
            left = gv[start - 1] if start > 0 else 0.0
            right = gv[end + 1] if end < grid_n else 0.0
            if np.min(np.abs(gv[run])) == 0.0:
                point = float(s[run[np.argmin(np.abs(gv[run]))]])
            elif left * right < 0:
                point = brentq(g, s[start - 1], s[end + 1], xtol=1e-15, rtol=1e-15)
            else:
                point = float(s[run[np.argmin(np.abs(gv[run]))]])
            isolated.append(float(point))

    # transversal sign changes between non-zero nodes
    nz = ~zero
    change = np.flatnonzero(nz[:-1] & nz[1:] & (np.sign(gv[:-1]) * np.sign(gv[1:]) < 0))
    for j in change:
        root = brentq(g, s[j], s[j + 1], xtol=1e-15, rtol=1e-15)
        sub = g(np.linspace(s[j], s[j + 1], 17))
        flips = np.count_nonzero(np.sign(sub[:-1]) * np.sign(sub[1:]) < 0)
        if flips > 1:
            warning = True
        isolated.append(float(root))

    # tangential contacts: local minima of |g| that do not change sign
    absg = np.abs(gv)
    sg = np.sign(gv)
    mid = slice(1, grid_n)
    candidates = (
        ~zero[mid]
        & (absg[mid] < np.sqrt(eps_eq))
        & (absg[mid] <= absg[:-2])
        & (absg[mid] <= absg[2:])
        & (sg[:-2] == sg[mid])
        & (sg[2:] == sg[mid])
    )
    for j in np.flatnonzero(candidates) + 1:
        res = minimize_scalar(lambda x: abs(g(x)), bounds=(s[j - 1], s[j + 1]), method="bounded",
                              options={"xatol": 1e-14})
        if abs(g(res.x)) <= eps_eq:
            isolated.append(float(res.x))

    # drop isolated points that fall inside plateaus, and duplicates
    isolated.sort()
    cleaned: list[float] = []
    for x in isolated:
        if any(lo - 1e-12 <= x <= hi + 1e-12 for lo, hi in plateaus):
            continue
        if cleaned and abs(x - cleaned[-1]) < 1e-9:
            continue
        cleaned.append(x)
    plateaus.sort()

    points = sorted(
        [(x, "isolated") for x in cleaned]
        + [(lo, "plateau_start") for lo, _ in plateaus]
        + [(hi, "plateau_end") for _, hi in plateaus]
    )
    boundary = [p for p, _ in points]

    intervals: list[tuple[float, float]] = []
    signs: list[int] = []
    edges = [0.0] + boundary + [1.0]
    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        intervals.append((lo, hi))
        if hi <= lo:
            signs.append(1 if i == 0 else -1)
        elif any(abs(lo - a) < 1e-15 and abs(hi - b) < 1e-15 for a, b in plateaus):
            signs.append(0)
        else:
            signs.append(_sign_of_interval(g, lo, hi))
    if not boundary:
        intervals = [(0.0, 1.0)]
        signs = [_sign_of_interval(g, 0.0, 1.0)]

    types = []
    for k, (x, origin) in enumerate(points):
        alpha, beta = signs[k], signs[k + 1]
        types.append(ContactType(x, alpha, beta, LABELS.get((alpha, beta), "half-plateau"), origin))

    z_minus, z_plus = reachable_interval(u, grid_n=grid_n)
    return ContactAnalysis(
        tuple(cleaned), tuple(plateaus), tuple(boundary), tuple(intervals), tuple(signs), tuple(types),
        z_minus, z_plus, warning, eps_eq,
    )


def classify_contact(analysis: ContactAnalysis, i: int) -> ContactType:
    """Type of the ``i``-th boundary point, read off the neighbouring interval signs."""
    if not 0 <= i < len(analysis.contact_types):
        raise IndexError(f"contact index {i} out of range")
    return analysis.contact_types[i]


def support_membership(u: UrnFunction, analysis: ContactAnalysis, i: int, delta: float = 1e-3,
                       ladder: int = 11, noise: float = 1e-8) -> str:
    """Whether the limit fraction can converge to contact ``i``.

    Returns ``in_support``, ``not_in_support``, ``polya_like`` or
    ``indeterminate``.  Touchpoints are decided by the one-sided difference
    quotient ``(pi(s + e) - pi(s)) / e`` on the side where ``pi - s`` pushes
    toward the contact: the contact is attainable iff the quotient lies in
    (1/2, 1).  The verdict is the majority over ``e = delta * 2**-j``.
    """
    c = classify_contact(analysis, i)
    if c.label == "downcrossing":
        return "in_support"
    if c.label == "upcrossing":
        return "not_in_support"
    if c.label == "half-plateau":
        return "polya_like"
    side = -1.0 if c.label == "touchpoint+" else 1.0
    eps = side * delta * 2.0 ** -np.arange(ladder)
    x = c.s + eps
    if np.any((x < 0.0) | (x > 1.0)):
        return "indeterminate"
    quotient = (u(x) - u(c.s)) / eps
    inside = np.count_nonzero((quotient > 0.5 + noise) & (quotient < 1.0 - noise))
    outside = np.count_nonzero((quotient < 0.5 - noise) | (quotient > 1.0 + noise))
    if inside > ladder // 2:
        return "in_support"
    if outside > ladder // 2:
        return "not_in_support"
    return "indeterminate"


def _wall_components(mask: np.ndarray, s: np.ndarray, pred) -> list[tuple[float, float]]:
    """Closed intervals of positive length on which ``pred`` holds, refined at both ends."""
    comps = []
    n = s.size - 1
    for start, end in _runs(mask):
        if end - start < 2:
            continue
        lo = s[start] if start == 0 else _bisect_predicate(pred, s[start], s[start - 1])
        hi = s[end] if end == n else _bisect_predicate(pred, s[end], s[end + 1])
        comps.append((float(lo), float(hi)))
    return comps


def reachable_interval(u: UrnFunction, init: tuple[int, int] | None = None, grid_n: int = 10_000
                       ) -> tuple[float, float]:
    """End points ``(z_minus, z_plus)`` of the set of attainable limit fractions.

    Uniform start: ``z_minus = inf{s: pi(s) < 1}`` and ``z_plus = sup{s: pi(s) > 0}``.
    Fixed start ``(m, X_m)``: regions of positive length where ``pi = 1`` below
    ``X_m / m`` and ``pi = 0`` above it act as walls.
    """
    s = np.linspace(0.0, 1.0, grid_n + 1)
    values = u(s)

    def below_one(x):
        return u(x) < 1.0 - WALL_TOL

    def above_zero(x):
        return u(x) > WALL_TOL

    if init is None:
        lt = np.flatnonzero(values < 1.0 - WALL_TOL)
        gt = np.flatnonzero(values > WALL_TOL)
        if lt.size == 0:
            z_minus = 1.0
        elif lt[0] == 0:
            z_minus = 0.0
        else:
            z_minus = _bisect_predicate(below_one, s[lt[0]], s[lt[0] - 1])
        if gt.size == 0:
            z_plus = 0.0
        elif gt[-1] == grid_n:
            z_plus = 1.0
        else:
            z_plus = _bisect_predicate(above_zero, s[gt[-1]], s[gt[-1] + 1])
        return float(z_minus), float(z_plus)

    m, xm = init
    if not (m >= 1 and 0 <= xm <= m):
        raise ValueError(f"invalid initial condition (m={m}, X_m={xm})")
    x0 = xm / m
    ones = _wall_components(values >= 1.0 - WALL_TOL, s, lambda x: not below_one(x))
    zeros = _wall_components(values <= WALL_TOL, s, lambda x: not above_zero(x))
    lower = [hi for lo, hi in ones if lo <= x0]
    upper = [lo for lo, hi in zeros if hi >= x0]
    z_minus = max(lower) if lower else 0.0
    z_plus = min(upper) if upper else 1.0
    return float(z_minus), float(z_plus)


def modified_urn(u: UrnFunction, init: tuple[int, int]) -> UrnFunction:
    """``u`` forced to 1 below and 0 above the reachable interval for a fixed start."""
    z_minus, z_plus = reachable_interval(u, init)
    if z_minus <= 0.0 and z_plus >= 1.0:
        return u
    breaks = [0.0]
    pieces = []
    if z_minus > 0.0:
        breaks.append(z_minus)
        pieces.append(constant(1.0))
    pieces.append(u)
    if z_plus < 1.0:
        breaks.append(z_plus)
        pieces.append(constant(0.0))
    breaks.append(1.0)
    # pi(z_plus) = 0 for continuous pi, so the half-open piece convention is harmless
    return piecewise(breaks, pieces, name=f"modified({u.label()})")
