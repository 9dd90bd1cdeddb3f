"""
Gaussian scale mixture errors: worst-case distribution of the t statistic.

For errors s_i Z_i the upper tail of T_n is maximized when k of the scales are
equal and the rest vanish, so 1 - t^G_{n-1}(a) is a max over k of classical
Student tails. Crossing points of consecutive k-curves increase to sqrt(3);
above sqrt(3) the classical t-test is already exact. Also: the n -> infinity
limit Phi^G, its quantiles, and the critical-value table.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from numerics.specfun import (
    ROOT_TOL,
    invert_monotone,
    normal_cdf,
    normal_quantile,
    student_t_sf,
)
from numerics.transform import a_from_x
from utils.errors import BracketError, DomainError, SolverError

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
CROSSING_TOL = 1e-10
CRITICAL_TOL = 1e-7

# Phi^G scan over k: geometric blocks, stop once past the peak
_SCAN_FIRST_BLOCK = 64
_SCAN_MAX_TERMS = 1 << 20


@dataclass(frozen=True)
class CrossingPoint:
    """Where the k-sample and (k+1)-sample Student tail curves intersect."""

    k: int
    a_star: float
    a_star_squared: float


@dataclass
class CriticalTable:
    """Critical x values; rows are degrees of freedom (sample size - 1), columns one-sided levels."""

    dofs: List[int]
    alphas: List[float]
    values: np.ndarray = field(repr=False)

    @property
    def rows(self) -> List[Tuple[int, Dict[float, float]]]:
        return [
            (dof, {alpha: float(self.values[i, j]) for j, alpha in enumerate(self.alphas)})
            for i, dof in enumerate(self.dofs)
        ]

    def value(self, dof: int, alpha: float) -> float:
        return float(self.values[self.dofs.index(dof), self.alphas.index(alpha)])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            self.values.reshape(len(self.dofs), len(self.alphas)),
            columns=[f"{alpha:.3f}" for alpha in self.alphas],
        )
        frame.insert(0, "dof", pd.Series(self.dofs, dtype="int64"))
        return frame


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"sample size must be an integer >= 2, got {n}")


def _term(a_sq: float, k: np.ndarray) -> np.ndarray:
    """P(t_{k-1} > sqrt(a^2 (k-1) / (k - a^2))) for integer k > a^2, k >= 2."""
    k = np.asarray(k, dtype=np.float64)
    x = np.sqrt(a_sq * (k - 1.0) / (k - a_sq))
    return np.asarray(student_t_sf(x, k - 1.0))


def g_terms(a: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """The k values with a^2 < k <= n and their Student tails, the candidates in the max."""
    _check_n(n)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    a_sq = a * a
    k_min = max(2, int(math.floor(a_sq)) + 1)
    ks = np.arange(k_min, n + 1)
    if ks.size == 0:
        return ks, np.empty(0)
    return ks, _term(a_sq, ks)


def g_tail(a: float, n: int) -> float:
    """1 - t^G_{n-1}(a): one-sided worst-case tail over Gaussian scale mixtures."""
    _check_n(n)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    if a < 1.0:
        return 0.5
    if a * a >= n:
        return 0.0
    _, tails = g_terms(a, n)
    return float(tails.max()) if tails.size else 0.0


def g_tail_at_x(x: float, n: int) -> float:
    """
    g_tail at a t-statistic threshold x >= 0.

    The k = n term is the classical tail at x, evaluated at x directly so
    g_tail >= classical tail holds in floating point too.
    """
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    return max(g_tail(a_from_x(x, n), n), float(student_t_sf(x, n - 1)))


def g_cdf(x: float, n: int) -> float:
    """t^G_{n-1} at a t-statistic threshold x; t^G(-x) = 1 - t^G(x)."""
    tail = g_tail_at_x(abs(x), n)
    return tail if x < 0 else 1.0 - tail


def g_argmax_k(a: float, n: int) -> int:
    """Number of equal nonzero scales attaining g_tail; smallest k on ties."""
    _check_n(n)
    if not (1.0 < a and a * a < n):
        raise DomainError(f"g_argmax_k needs 1 < a < sqrt(n) = {math.sqrt(n):.6g}, got {a}")
    ks, tails = g_terms(a, n)
    return int(ks[int(np.argmax(tails))])


def _crossing_gap(a: float, k: int) -> float:
    a_sq = a * a
    left = float(_term(a_sq, np.array([k]))[0]) if a_sq < k else 0.0
    right = float(_term(a_sq, np.array([k + 1]))[0]) if a_sq < k + 1 else 0.0
    return left - right


@lru_cache(maxsize=4096)
def crossing_point(k: int) -> CrossingPoint:
    """Solve tail_k(a) = tail_{k+1}(a) for a in (1, sqrt(3)) by bisection."""
    if int(k) != k or k < 2:
        raise DomainError(f"crossing_point needs an integer k >= 2, got {k}")
    lo, hi = 1.0, min(SQRT3, math.sqrt(k))
    try:
        a_star = invert_monotone(lambda a: _crossing_gap(a, k), 0.0, lo, hi, tol=CROSSING_TOL)
    except BracketError as exc:
        raise SolverError(f"no sign change for crossing k={k} on [{lo}, {hi}]") from exc
    logger.debug("crossing k=%d at a=%.12f", k, a_star)
    return CrossingPoint(k=int(k), a_star=a_star, a_star_squared=a_star * a_star)


def _phi_g_sup_tail(x: float) -> float:
    """sup over k > x^2 of the k-sample tail at a = x, floored by the normal tail."""
    x_sq = x * x
    k_next = max(2, int(math.floor(x_sq)) + 1)
    best = 0.0
    last = math.inf
    block = _SCAN_FIRST_BLOCK
    scanned = 0
    while scanned < _SCAN_MAX_TERMS:
        ks = np.arange(k_next, k_next + block)
        tails = _term(x_sq, ks)
        block_max = float(tails.max())
        past_peak = block_max <= best and tails[-1] <= tails[0] and tails[0] <= last
        best = max(best, block_max)
        last = float(tails[-1])
        scanned += block
        k_next += block
        if past_peak:
            break
        block *= 2
    else:
        logger.warning("Phi^G scan at x=%.9f stopped after %d terms", x, scanned)
    return max(best, 1.0 - float(normal_cdf(x)))


def phi_g(x: float) -> float:
    """Phi^G(x) = lim t^G_n(x): 1/2 below 1, 3/4 at 1, Phi(x) from sqrt(3) on."""
    if x < 0:
        return 1.0 - phi_g(-x)
    if x < 1.0:
        return 0.5
    if x == 1.0:
        return 0.75
    if x >= SQRT3:
        return float(normal_cdf(x))
    return 1.0 - _phi_g_sup_tail(x)


def phi_g_quantile(p: float) -> float:
    """Smallest x with phi_g(x) >= p; every p in (0.5, 0.75] maps to the jump at 1."""
    if not 0.5 < p < 1.0:
        raise DomainError(f"phi_g_quantile needs 0.5 < p < 1, got {p}")
    if p <= 0.75:
        return 1.0
    z = float(normal_quantile(p))
    if z >= SQRT3:
        return z
    return invert_monotone(phi_g, p, 1.0, SQRT3, tol=ROOT_TOL)


def _decreasing_root(tail_at, alpha: float, tol: float) -> float:
    """Smallest x >= 0 with tail_at(x) <= alpha for a nonincreasing tail_at with tail_at(1) > alpha."""
    hi = 2.0
    while tail_at(hi) > alpha:
        hi *= 2.0
        if hi > 1e12:
            raise SolverError(f"no critical value below {hi:g} at level {alpha}")
    return invert_monotone(tail_at, alpha, hi / 2.0, hi, tol=tol)


@lru_cache(maxsize=1024)
def classical_critical_value(n: int, alpha: float) -> float:
    """One-sided Student t critical value with n - 1 degrees of freedom."""
    _check_n(n)
    if not 0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha}")
    nu = n - 1
    lo_tail = float(student_t_sf(1.0, nu))
    if lo_tail <= alpha:
        return invert_monotone(lambda x: float(student_t_sf(x, nu)), alpha, 0.0, 1.0, tol=CRITICAL_TOL)
    return _decreasing_root(lambda x: float(student_t_sf(x, nu)), alpha, CRITICAL_TOL)


@lru_cache(maxsize=1024)
def g_critical_value(n: int, alpha: float) -> float:
    """Smallest x with g_tail(a_from_x(x, n), n) <= alpha, for 0 < alpha < 1/4."""
    _check_n(n)
    if not 0 < alpha < 0.25:
        raise DomainError(f"alpha must lie in (0, 0.25) for the scale-mixture model, got {alpha}")
    # a_from_x(1, n) = 1 where the tail is 1/4, so the root lies above x = 1
    return _decreasing_root(lambda x: g_tail(a_from_x(x, n), n), alpha, CRITICAL_TOL)


def g_quantile(p: float, n: int) -> float:
    """Smallest x with g_cdf(x, n) >= p for p in (0.5, 1)."""
    _check_n(n)
    if not 0.5 < p < 1.0:
        raise DomainError(f"g_quantile needs 0.5 < p < 1, got {p}")
    if p <= 0.75:
        return 1.0
    return g_critical_value(n, 1.0 - p)


def generate_table(dof_list: Sequence[int], alphas: Sequence[float]) -> CriticalTable:
    """Grid of g_critical_value(dof + 1, alpha); rows follow dof_list order."""
    dofs = [int(d) for d in dof_list]
    levels = [float(a) for a in alphas]
    for dof in dofs:
        if dof < 1:
            raise DomainError(f"degrees of freedom must be >= 1, got {dof}")
    values = np.empty((len(dofs), len(levels)))
    for i, dof in enumerate(dofs):
        for j, alpha in enumerate(levels):
            values[i, j] = g_critical_value(dof + 1, alpha)
        logger.info("table row dof=%d done", dof)
    return CriticalTable(dofs=dofs, alphas=levels, values=values)
