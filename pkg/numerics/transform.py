"""
Statistic-level identities: the one-sample t statistic, the self-normalized
ratio (sum xi)^2 / sum xi^2, and the a <-> x reparametrization
a^2 = n x^2 / (x^2 + n - 1) that makes the two events coincide.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from utils.errors import DegenerateSampleError, DomainError


@dataclass(frozen=True)
class SampleConfig:
    """Sample size and one-sided significance level."""

    n: int
    alpha: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"sample size must be an integer >= 2, got {self.n}")
        if not 0 < self.alpha < 0.5:
            raise DomainError(f"alpha must lie in (0, 0.5), got {self.alpha}")


@dataclass(frozen=True)
class ThresholdPair:
    """A t-statistic threshold x and the matching ratio threshold a for sample size n."""

    n: int
    x: float
    a: float

    @classmethod
    def from_x(cls, x: float, n: int) -> "ThresholdPair":
        return cls(n=n, x=float(x), a=a_from_x(x, n))

    @classmethod
    def from_a(cls, a: float, n: int) -> "ThresholdPair":
        return cls(n=n, x=x_from_a(a, n), a=float(a))


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"sample size must be an integer >= 2, got {n}")


def a_from_x(x: float, n: int) -> float:
    """sqrt(n x^2 / (x^2 + n - 1)); strictly increasing, range [0, sqrt(n))."""
    _check_n(n)
    if not x >= 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if math.isinf(x):
        return math.sqrt(n)
    x_sq = x * x
    return math.sqrt(n * x_sq / (x_sq + n - 1))


def x_from_a(a: float, n: int) -> float:
    """Inverse of a_from_x: sqrt(a^2 (n - 1) / (n - a^2)) for 0 <= a < sqrt(n)."""
    _check_n(n)
    if not a >= 0:
        raise DomainError(f"a must be nonnegative, got {a}")
    a_sq = a * a
    if a_sq >= n:
        raise DomainError(f"a must be below sqrt(n) = {math.sqrt(n):.6g}, got {a}")
    return math.sqrt(a_sq * (n - 1) / (n - a_sq))


def classical_region_threshold(n: int) -> float:
    """x above which a(x) >= sqrt(3), i.e. sqrt(3(n-1)/(n-3)); inf for n <= 3."""
    _check_n(n)
    if n <= 3:
        return math.inf
    return math.sqrt(3.0 * (n - 1) / (n - 3))


def t_statistic(sample: Sequence[float], mu: float) -> float:
    """sqrt(n) (mean - mu) / S with the two-pass sample standard deviation."""
    values = np.asarray(sample, dtype=np.float64)
    n = values.size
    if n < 2:
        raise DomainError(f"t statistic needs at least 2 observations, got {n}")
    mean = values.mean()
    centered = values - mean
    # second pass corrects the mean for rounding in the first
    correction = centered.sum()
    ss = float(np.dot(centered, centered) - correction * correction / n)
    if ss <= 0 or np.all(values == values[0]):
        raise DegenerateSampleError("constant sample: S = 0, t statistic undefined")
    s = math.sqrt(ss / (n - 1))
    return float(math.sqrt(n) * ((mean - mu) + correction / n) / s)


def ratio_statistic(errors: Sequence[float]) -> float:
    """(sum xi)^2 / sum xi^2, in [0, n]; equals n iff all entries are equal."""
    values = np.asarray(errors, dtype=np.float64)
    if values.size == 0 or not np.any(values != 0):
        raise DegenerateSampleError("ratio statistic needs at least one nonzero error")
    total = float(values.sum())
    ratio = total * total / float(np.dot(values, values))
    return min(ratio, float(values.size))


def ratio_statistics(errors: np.ndarray) -> np.ndarray:
    """Row-wise ratio statistic for a (reps, n) array; all-zero rows give nan."""
    values = np.asarray(errors, dtype=np.float64)
    sums = values.sum(axis=1)
    squares = np.einsum("ij,ij->i", values, values)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = sums * sums / squares
    return np.minimum(ratios, values.shape[1])
