"""
Symmetric errors: scale mixtures of random signs.

1 - t^S_{n-1}(a) = m / 2^n where m is the largest number of cube vertices
{-1, +1}^n in a closed halfspace <v, u> >= a, |u| = 1. Exact m comes from a
finite candidate set of directions (min-norm points of small vertex sets, which
contain every optimal halfspace direction); beyond N_MAX only the lower bound
2^-ceil(a^2) is offered.

Subscript convention: t^S_{n-1} for sample size n, as for t^G.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from models.min_norm import MNP_TOL, affine_min_norm, min_norm_point
from numerics.transform import x_from_a
from utils.errors import CapabilityError, DomainError, InfeasibleLevelError

logger = logging.getLogger(__name__)

N_MAX = 5
COUNT_TOL = 1e-10
_CEIL_TOL = 1e-12
_KEY_DECIMALS = 12

# Conjectured Phi^S quantiles (a, Phi^S(a)); consistency checks only
PHI_S_CONJECTURED: Tuple[Tuple[float, float], ...] = (
    (math.sqrt(3.0), 0.9),
    (2.0, 0.95),
    (math.sqrt(5.0), 0.975),
)


@dataclass(frozen=True)
class VertexCoverResult:
    n: int
    a: float
    m: int
    witness: np.ndarray
    exact: bool

    @property
    def tail(self) -> float:
        return self.m / float(2 ** self.n)


@dataclass(frozen=True)
class SBound:
    a: float
    lower: float
    exact_tail: Optional[float] = None


@dataclass(frozen=True)
class SCriticalValue:
    """Infimum critical value; exact=False means derived from the lower bound only."""

    n: int
    alpha: float
    a: float
    x: float
    exact: bool


def _ceil_sq(a: float) -> int:
    return int(math.ceil(a * a - _CEIL_TOL))


def hypercube_vertices(n: int) -> np.ndarray:
    """All 2^n sign vectors; row 0 is the all-ones vertex."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def _canonical(u: np.ndarray) -> np.ndarray:
    # vertex counts are invariant under coordinate sign flips and permutations
    return np.sort(np.abs(u))[::-1]


@lru_cache(maxsize=None)
def _candidate_directions(n: int) -> np.ndarray:
    """
    Unit directions containing an optimal halfspace for every a.

    An optimal vertex set's min-norm point is the affine min-norm point of at most
    n affinely independent members; up to symmetry one member is the all-ones
    vertex. Normals of (n-1)-vertex spans cover the a = 0 case.
    """
    vertices = hypercube_vertices(n)
    others = range(1, len(vertices))
    found = {}

    def add(direction: np.ndarray) -> None:
        u = _canonical(direction / np.linalg.norm(direction))
        found.setdefault(tuple(np.round(u, _KEY_DECIMALS)), u)

    for size in range(n):
        for combo in itertools.combinations(others, size):
            subset = vertices[[0, *combo]]
            if size and np.linalg.matrix_rank(subset[1:] - subset[0]) < size:
                continue
            point, weights = affine_min_norm(subset)
            if weights.min() < -_CEIL_TOL or np.linalg.norm(point) < MNP_TOL:
                continue
            add(point)
    if n >= 2:
        for combo in itertools.combinations(others, n - 2):
            subset = vertices[[0, *combo]]
            _, singular, vt = np.linalg.svd(subset)
            if np.sum(singular > 1e-9) == n - 1:
                add(vt[-1])
    else:
        add(np.ones(1))
    keys = sorted(found)
    logger.debug("n=%d: %d candidate directions", n, len(keys))
    return np.array([found[k] for k in keys])


@lru_cache(maxsize=None)
def _projections(n: int) -> np.ndarray:
    return _candidate_directions(n) @ hypercube_vertices(n).T


def _check_exact_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {n}")
    if n > N_MAX:
        raise CapabilityError(f"exact symmetric tail limited to n <= {N_MAX}; use s_tail_lower_bound")


def is_coverable(vertex_set: np.ndarray, a: float) -> bool:
    """True when some unit u has <v, u> >= a for every row v."""
    return float(np.linalg.norm(min_norm_point(vertex_set))) >= a - MNP_TOL


def s_tail_exact(n: int, a: float) -> VertexCoverResult:
    """Exact m(n, a) with a witness direction, for 1 <= n <= N_MAX."""
    _check_exact_n(n)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    if a * a > n + _CEIL_TOL:
        return VertexCoverResult(n=n, a=a, m=0, witness=np.full(n, 1.0 / math.sqrt(n)), exact=True)
    directions = _candidate_directions(n)
    counts = (_projections(n) >= a - COUNT_TOL).sum(axis=1)
    best = int(np.argmax(counts))
    witness = directions[best]
    if a > 0:
        covered = hypercube_vertices(n)[_projections(n)[best] >= a - COUNT_TOL]
        if not is_coverable(covered, a):
            logger.warning("witness for n=%d, a=%.9f failed the min-norm certificate", n, a)
    return VertexCoverResult(n=n, a=a, m=int(counts[best]), witness=witness, exact=True)


@lru_cache(maxsize=None)
def s_tail_steps(n: int) -> Tuple[Tuple[float, int], ...]:
    """
    Step function of m(a) for a > 0: pairs (b, m) meaning m(a) = m on (b_prev, b].

    Breakpoints are the distinct positive projections of candidate directions
    onto vertices; the last is sqrt(n) with m = 1.
    """
    _check_exact_n(n)
    proj = _projections(n)
    breaks = np.unique(np.round(proj[proj > COUNT_TOL], _KEY_DECIMALS))
    steps: List[Tuple[float, int]] = []
    for b in breaks:
        m = int((proj >= b - COUNT_TOL).sum(axis=1).max())
        steps.append((float(b), m))
    return tuple(steps)


def s_tail_lower_bound(a: float) -> float:
    """2^-ceil(a^2), valid for 0 < a <= sqrt(n)."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    return 2.0 ** (-_ceil_sq(a))


def s_bound(a: float, n: Optional[int] = None) -> SBound:
    exact_tail = s_tail_exact(n, a).tail if n is not None and n <= N_MAX else None
    return SBound(a=a, lower=s_tail_lower_bound(a), exact_tail=exact_tail)


def phi_s_approx(a: float) -> float:
    """
    1 - 2^-ceil(a^2), conjectured to approximate Phi^S(a) closely.

    Since 2^-ceil(a^2) bounds every finite-n tail from below, this bounds Phi^S from above.
    """
    return 1.0 - s_tail_lower_bound(a)


def phi_s_approx_quantile(p: float) -> float:
    """Infimum a with phi_s_approx(a) >= p."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    j = int(math.ceil(math.log2(1.0 / (1.0 - p)) - _CEIL_TOL))
    return math.sqrt(max(j - 1, 0))


def s_critical_value(n: int, alpha: float) -> SCriticalValue:
    """
    Infimum of x with 1 - t^S_{n-1}(a(x)) <= alpha.

    The tail is a step function in a, so the infimum sits on a breakpoint and the
    tail there still exceeds alpha; any larger x is admissible. Above N_MAX the
    answer comes from the lower bound and is flagged exact=False.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"sample size must be an integer >= 2, got {n}")
    if not 0 < alpha < 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha}")
    minimum_level = 2.0 ** (-n)
    if alpha < minimum_level:
        raise InfeasibleLevelError(
            f"level {alpha:g} is below the smallest achievable tail 2^-{n} = {minimum_level:g}",
            minimum_level=minimum_level,
        )
    if n <= N_MAX:
        scale = float(2 ** n)
        a_star = None
        previous = 0.0
        for b, m in s_tail_steps(n):
            if m / scale <= alpha:
                a_star = previous
                break
            previous = b
        if a_star is None:
            raise InfeasibleLevelError(f"no step of the n={n} tail reaches {alpha:g}", minimum_level)
        return SCriticalValue(n=n, alpha=alpha, a=a_star, x=x_from_a(a_star, n), exact=True)

    j = int(math.ceil(math.log2(1.0 / alpha) - _CEIL_TOL))
    if j - 1 >= n:
        raise InfeasibleLevelError(f"bound-based critical value needs 2^-{n} <= alpha", minimum_level)
    a_star = math.sqrt(j - 1)
    logger.warning("n=%d exceeds exhaustive search; critical value from the 2^-ceil(a^2) bound", n)
    return SCriticalValue(n=n, alpha=alpha, a=a_star, x=x_from_a(a_star, n), exact=False)
