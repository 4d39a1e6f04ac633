"""Exact law of the urn counter by forward dynamic programming in log space.

``X_k`` counts black balls added among the first ``k`` steps; given ``X_k = j``
the next ball is black with probability ``pi(j / k)``.  The uniform start puts
mass 1/2 on each of ``X_1 = 0`` and ``X_1 = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import UrnValidationError
from .urn import UrnFunction

Init = Union[str, tuple[int, int], None]
UrnLike = Union[UrnFunction, Callable[[int], UrnFunction]]

LOG_HALF = float(np.log(0.5))
ZERO_FLOOR = 1e-300


@dataclass(frozen=True)
class TerminalDistribution:
    n: int
    init: tuple[int, int] | str
    log_p: np.ndarray

    @property
    def p(self) -> np.ndarray:
        return np.exp(self.log_p)

    def total_log_mass(self) -> float:
        return float(logsumexp(self.log_p))


def _resolve(u: UrnLike, n: int) -> UrnFunction:
    """Inhomogeneous families are callables ``n -> UrnFunction``."""
    return u if isinstance(u, UrnFunction) else u(n)


def _normalise_init(init: Init, n: int) -> tuple[int, np.ndarray, tuple[int, int] | str]:
    if init is None or init == "uniform":
        return 1, np.array([LOG_HALF, LOG_HALF]), "uniform"
    try:
        m, xm = (int(v) for v in init)
    except (TypeError, ValueError):
        raise UrnValidationError("invalid initial condition", [f"expected 'uniform' or (m, X_m), got {init!r}"])
    if not (1 <= m <= n and 0 <= xm <= m):
        raise UrnValidationError("invalid initial condition", [f"need 1 <= m <= n and 0 <= X_m <= m (m={m}, X_m={xm}, n={n})"])
    row = np.full(m + 1, -np.inf)
    row[xm] = 0.0
    return m, row, (m, xm)


def _log_probs(u: UrnFunction, k: int) -> tuple[np.ndarray, np.ndarray]:
    """log pi(j/k) and log(1 - pi(j/k)) for j = 0..k, with exact zeros as -inf."""
    p = u(np.arange(k + 1) / k)
    with np.errstate(divide="ignore"):
        lp = np.where(p < ZERO_FLOOR, -np.inf, np.log(np.where(p < ZERO_FLOOR, 1.0, p)))
        q = 1.0 - p
        lq = np.where(q < ZERO_FLOOR, -np.inf, np.log(np.where(q < ZERO_FLOOR, 1.0, q)))
    return lp, lq


def _advance(row: np.ndarray, lp: np.ndarray, lq: np.ndarray) -> np.ndarray:
    nxt = np.full(row.size + 1, -np.inf)
    stay = row + lq
    move = row + lp
    nxt[:-1] = stay
    nxt[1:] = np.logaddexp(nxt[1:], move)
    return nxt


def step_laws(u: UrnLike, n: int, init: Init = "uniform") -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(k, log P(X_k = .))`` for every step from the start up to ``n``."""
    urn = _resolve(u, n)
    k, row, _ = _normalise_init(init, n)
    yield k, row
    while k < n:
        lp, lq = _log_probs(urn, k)
        row = _advance(row, lp, lq)
        k += 1
        yield k, row


def terminal_distribution(u: UrnLike, n: int, init: Init = "uniform") -> TerminalDistribution:
    """Exact law of ``X_n``; O(n^2) time and O(n) memory."""
    if n < 1:
        raise UrnValidationError("invalid horizon", [f"n must be >= 1, got {n}"])
    _, _, label = _normalise_init(init, n)
    row = None
    for _, row in step_laws(u, n, init):
        pass
    return TerminalDistribution(n, label, row)


def phi_n(dist: TerminalDistribution, s: float) -> float:
    """``log P(X_n = floor(s n)) / n``."""
    k = int(np.floor(s * dist.n + 1e-12))
    return float(dist.log_p[k]) / dist.n


def psi_n(dist: TerminalDistribution, lam: float | Sequence[float]):
    """``log E exp(lam X_n) / n``; vectorised over ``lam``."""
    k = np.arange(dist.n + 1)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    finite = np.isfinite(dist.log_p)
    vals = logsumexp(lam_arr[:, None] * k[finite][None, :] + dist.log_p[finite][None, :], axis=1) / dist.n
    vals = np.where(lam_arr == 0.0, 0.0, vals)
    return float(vals[0]) if np.ndim(lam) == 0 else vals


def mgf_recursion_residual(u: UrnLike, n: int, lam: float, init: Init = "uniform") -> float:
    """Largest relative mismatch in the one-step moment generating function recursion.

    Checks ``E e^{lam X_{k+1}} - E e^{lam X_k} = (e^lam - 1) E[pi(X_k/k) e^{lam X_k}]``
    for every step, each side scaled by ``E e^{lam X_{k+1}}``.
    """
    urn = _resolve(u, n)
    worst = 0.0
    prev = None
    for k, row in step_laws(urn, n, init):
        if prev is not None:
            pk, prow = prev
            j_prev = np.arange(pk + 1)
            j = np.arange(k + 1)
            scale = logsumexp(lam * j + row)
            lhs = np.exp(logsumexp(lam * j + row) - scale) - np.exp(logsumexp(lam * j_prev + prow) - scale)
            weights = urn(j_prev / pk)
            with np.errstate(divide="ignore"):
                log_w = np.log(weights)
            rhs = np.expm1(lam) * np.exp(logsumexp(lam * j_prev + prow + log_w) - scale)
            worst = max(worst, abs(lhs - rhs))
        prev = (k, row)
    return worst


def conditional_marginals(
    u: UrnLike,
    n: int,
    k_terminal: int,
    taus: Sequence[float],
    init: Init = "uniform",
) -> np.ndarray:
    """``E[X_j / j | X_n = k_terminal]`` at ``j = max(start, floor(tau n))`` for each tau.

    Backward hitting probabilities are stored only at the requested steps;
    a forward sweep then combines them with the forward law.
    """
    urn = _resolve(u, n)
    start, _, _ = _normalise_init(init, n)
    steps = np.array([min(n, max(start, int(np.floor(t * n + 1e-12)))) for t in taus])
    wanted = set(int(j) for j in steps)

    # backward: beta_k(j) = log P(X_n = K | X_k = j)
    beta = np.full(n + 1, -np.inf)
    if not 0 <= k_terminal <= n:
        raise UrnValidationError("unreachable terminal state", [f"k_terminal={k_terminal} outside [0, {n}]"])
    beta[k_terminal] = 0.0
    stored = {n: beta.copy()} if n in wanted else {}
    for k in range(n - 1, start - 1, -1):
        lp, lq = _log_probs(urn, k)
        beta = np.logaddexp(lq + beta[:-1], lp + beta[1:])
        if k in wanted:
            stored[k] = beta.copy()

    means = {}
    for k, row in step_laws(urn, n, init):
        if k in stored:
            joint = row + stored[k]
            total = logsumexp(joint)
            if not np.isfinite(total):
                raise UrnValidationError("unreachable terminal state", [f"P(X_n = {k_terminal}) = 0"])
            means[k] = float(np.sum(np.exp(joint - total) * np.arange(k + 1)) / k)
    return np.array([means[int(j)] for j in steps])
