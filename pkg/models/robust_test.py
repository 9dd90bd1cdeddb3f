"""
Apply the robust t-test to data, and dispatch CDF / quantile / critical-value
requests to the classical, scale-mixture (G) and symmetric (S) models plus the
two limits phiG and phiS.

Every value carries a provenance label: "exact" when it is the model's value,
"bound" when only a bound is available (symmetric model beyond the exhaustive
search, or the phiS approximation).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from models import gmix, symt
from numerics.specfun import student_t_sf
from numerics.transform import a_from_x, t_statistic, x_from_a
from utils.errors import DomainError

logger = logging.getLogger(__name__)

FINITE_MODELS = ("classic", "G", "S")
LIMIT_MODELS = ("phiG", "phiS")
MODELS = FINITE_MODELS + LIMIT_MODELS

EXACT = "exact"
BOUND = "bound"


@dataclass(frozen=True)
class CriticalValue:
    model: str
    n: int
    alpha: float
    x: float
    a: float
    provenance: str


@dataclass(frozen=True)
class CdfValue:
    model: str
    n: Optional[int]
    x: float
    a: float
    cdf: float
    tail: float
    provenance: str


@dataclass(frozen=True)
class QuantileValue:
    model: str
    n: Optional[int]
    p: float
    x: float
    provenance: str


@dataclass(frozen=True)
class RobustTestResult:
    statistic: float
    critical_value: CriticalValue
    p_value: Optional[float]
    reject: bool


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    critical_value: CriticalValue


def _check_model(model: str, allowed=MODELS) -> None:
    if model not in allowed:
        raise DomainError(f"unknown model {model!r}; expected one of {', '.join(allowed)}")


def _require_n(model: str, n: Optional[int]) -> int:
    if n is None:
        raise DomainError(f"model {model} needs a sample size n")
    if int(n) != n or n < 2:
        raise DomainError(f"sample size must be an integer >= 2, got {n}")
    return int(n)


def critical_value(model: str, n: int, alpha: float) -> CriticalValue:
    """Smallest x with one-sided tail <= alpha under the model."""
    _check_model(model, FINITE_MODELS)
    n = _require_n(model, n)
    provenance = EXACT
    if model == "classic":
        x = gmix.classical_critical_value(n, alpha)
    elif model == "G":
        x = gmix.g_critical_value(n, alpha)
    else:
        s_value = symt.s_critical_value(n, alpha)
        x = s_value.x
        provenance = EXACT if s_value.exact else BOUND
    return CriticalValue(model=model, n=n, alpha=alpha, x=x, a=a_from_x(x, n), provenance=provenance)


def _finite_tail(model: str, x: float, a: float, n: int) -> float:
    if model == "classic":
        return float(student_t_sf(x, n - 1))
    if model == "G":
        # the k = n term at x itself keeps the classical tail a floor in floating point
        return max(gmix.g_tail(a, n), float(student_t_sf(x, n - 1)))
    return symt.s_tail_exact(n, a).tail


def evaluate_cdf(model: str, x: Optional[float] = None, a: Optional[float] = None, n: Optional[int] = None) -> CdfValue:
    """
    CDF and upper tail at a threshold given as x (t statistic) or a (ratio scale).

    For the limits phiG and phiS the two scales coincide. phiS is the approximation
    1 - 2^-ceil(a^2); its tail 2^-ceil(a^2) is a lower bound on every finite-n
    symmetric tail, so it is labelled a bound.
    """
    _check_model(model)
    if (x is None) == (a is None):
        raise DomainError("give exactly one of x or a")

    if model in LIMIT_MODELS:
        value = float(x if x is not None else a)
        if model == "phiG":
            cdf = gmix.phi_g(value)
            return CdfValue(model, None, value, value, cdf, 1.0 - cdf, EXACT)
        if not value > 0:
            raise DomainError(f"phiS needs a positive threshold, got {value}")
        cdf = symt.phi_s_approx(value)
        return CdfValue(model, None, value, value, cdf, 1.0 - cdf, BOUND)

    n = _require_n(model, n)
    if x is None:
        if a < 0:
            raise DomainError(f"a must be nonnegative, got {a}")
        x = x_from_a(a, n) if a * a < n else math.inf
    elif x < 0:
        # reflection: F(-x) = 1 - F(x) for every model here
        mirrored = evaluate_cdf(model, x=-x, n=n)
        return CdfValue(model, n, x, -mirrored.a, mirrored.tail, mirrored.cdf, mirrored.provenance)
    else:
        a = a_from_x(x, n)

    if model == "S" and n > symt.N_MAX:
        tail = symt.s_tail_lower_bound(a)
        logger.warning("n=%d above exhaustive search; reporting the 2^-ceil(a^2) lower bound on the tail", n)
        return CdfValue(model, n, x, a, 1.0 - tail, tail, BOUND)
    tail = _finite_tail(model, x, a, n)
    return CdfValue(model, n, x, a, 1.0 - tail, tail, EXACT)


def evaluate_quantile(model: str, p: float, n: Optional[int] = None) -> QuantileValue:
    """Left-continuous quantile inf{x : F(x) >= p}."""
    _check_model(model)
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if model == "phiG":
        return QuantileValue(model, None, p, gmix.phi_g_quantile(p), EXACT)
    if model == "phiS":
        return QuantileValue(model, None, p, symt.phi_s_approx_quantile(p), BOUND)

    n = _require_n(model, n)
    if model == "classic":
        if p == 0.5:
            x = 0.0
        elif p > 0.5:
            x = gmix.classical_critical_value(n, 1.0 - p)
        else:
            x = -gmix.classical_critical_value(n, p)
        return QuantileValue(model, n, p, x, EXACT)
    if model == "G":
        return QuantileValue(model, n, p, gmix.g_quantile(p, n), EXACT)
    if not p > 0.5:
        raise DomainError(f"symmetric-model quantile needs p in (0.5, 1), got {p}")
    value = critical_value("S", n, 1.0 - p)
    return QuantileValue(model, n, p, value.x, value.provenance)


def p_value(model: str, statistic: float, n: int) -> Optional[float]:
    """Two-sided conservative p-value min(1, 2 tail(|T|)); None when no upper bound is known."""
    _check_model(model, FINITE_MODELS)
    n = _require_n(model, n)
    if model == "S" and n > symt.N_MAX:
        return None
    return min(1.0, 2.0 * _finite_tail(model, abs(statistic), a_from_x(abs(statistic), n), n))


def robust_t_test(sample: Sequence[float], mu: float = 0.0, alpha: float = 0.025, model: str = "G") -> RobustTestResult:
    """Two-sided test of the center mu: reject when |T| exceeds the one-sided level-alpha critical value."""
    values = np.asarray(sample, dtype=np.float64)
    n = int(values.size)
    statistic = t_statistic(values, mu)
    cv = critical_value(model, n, alpha)
    result = RobustTestResult(
        statistic=statistic,
        critical_value=cv,
        p_value=p_value(model, statistic, n),
        reject=abs(statistic) > cv.x,
    )
    logger.debug("robust t-test model=%s n=%d T=%.6g x=%.6g reject=%s", model, n, statistic, cv.x, result.reject)
    return result


def robust_confidence_interval(sample: Sequence[float], level: float = 0.95, model: str = "G") -> ConfidenceInterval:
    """mean +- x S / sqrt(n) with x the critical value at one-sided level (1 - level) / 2."""
    if not 0 < level < 1:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    values = np.asarray(sample, dtype=np.float64)
    n = int(values.size)
    # validates n and rejects constant samples
    t_statistic(values, 0.0)
    cv = critical_value(model, n, (1.0 - level) / 2.0)
    half_width = cv.x * float(np.std(values, ddof=1)) / math.sqrt(n)
    center = float(values.mean())
    return ConfidenceInterval(lower=center - half_width, upper=center + half_width, level=level, critical_value=cv)
