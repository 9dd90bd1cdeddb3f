"""
Special functions behind every distribution evaluation in RTT.

log-gamma, the regularized incomplete beta (modified Lentz continued fraction),
Student t / normal / Cauchy CDFs and a bisection inverter for monotone functions.
Everything accepts scalars or numpy arrays; scalar in, float out.
"""

import logging
from typing import Callable

import numpy as np
from scipy import special

from utils.errors import BracketError, DomainError

logger = logging.getLogger(__name__)

FUNCTION_TOL = 1e-12
ROOT_TOL = 1e-9

# Continued fraction controls (Numerical Recipes betacf, 3rd ed. limits)
_CF_EPS = 1e-15
_CF_FPMIN = 1e-300
_CF_MAXIT = 10000


def _as_output(value: np.ndarray, *inputs) -> "float | np.ndarray":
    if all(np.ndim(v) == 0 for v in inputs):
        return float(value)
    return value


def log_gamma(x):
    """ln Γ(x) for x > 0."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return _as_output(special.gammaln(arr), x)


def _betacf(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a, b), evaluated elementwise until every lane converges."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _CF_FPMIN, _CF_FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2.0 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_FPMIN, _CF_FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_FPMIN, _CF_FPMIN, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _CF_FPMIN, _CF_FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _CF_FPMIN, _CF_FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _CF_EPS
        if not active.any():
            return h
    logger.warning("Incomplete beta continued fraction hit %d iterations on %d lanes", _CF_MAXIT, int(active.sum()))
    return h


def reg_inc_beta(a, b, x):
    """
    Regularized incomplete beta I_x(a, b).

    Uses the continued fraction on whichever side of x = (a+1)/(a+b+2) converges,
    with the symmetry I_x(a, b) = 1 - I_{1-x}(b, a) on the other.
    """
    a_arr, b_arr, x_arr = np.broadcast_arrays(
        np.asarray(a, dtype=np.float64),
        np.asarray(b, dtype=np.float64),
        np.asarray(x, dtype=np.float64),
    )
    if np.any(~(a_arr > 0)) or np.any(~(b_arr > 0)):
        raise DomainError("reg_inc_beta requires a > 0 and b > 0")
    if np.any(~((x_arr >= 0) & (x_arr <= 1))):
        raise DomainError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")

    shape = x_arr.shape
    a_flat, b_flat, x_flat = a_arr.ravel(), b_arr.ravel(), x_arr.ravel()
    interior = (x_flat > 0) & (x_flat < 1)
    out = np.where(x_flat >= 1, 1.0, 0.0)
    if interior.any():
        ai, bi, xi = a_flat[interior], b_flat[interior], x_flat[interior]
        log_front = (
            ai * np.log(xi)
            + bi * np.log1p(-xi)
            - (log_gamma(ai) + log_gamma(bi) - log_gamma(ai + bi))
        )
        front = np.exp(log_front)
        swap = xi >= (ai + 1.0) / (ai + bi + 2.0)
        ca = np.where(swap, bi, ai)
        cb = np.where(swap, ai, bi)
        cx = np.where(swap, 1.0 - xi, xi)
        cf = _betacf(ca, cb, cx)
        direct = front * cf / ca
        value = np.where(swap, 1.0 - direct, direct)
        out[interior] = np.clip(value, 0.0, 1.0)
    return _as_output(out.reshape(shape), a, b, x)


def _check_dof(nu) -> np.ndarray:
    nu_arr = np.asarray(nu, dtype=np.float64)
    if np.any(~(nu_arr >= 1)):
        raise DomainError(f"degrees of freedom must be >= 1, got {nu!r}")
    return nu_arr


def student_t_sf(t, nu):
    """Upper tail P(t_nu > t), computed without 1 - cdf cancellation."""
    nu_arr = _check_dof(nu)
    t_arr = np.asarray(t, dtype=np.float64)
    t_sq = t_arr * t_arr
    with np.errstate(invalid="ignore", divide="ignore"):
        x = np.where(np.isinf(t_sq), 0.0, nu_arr / (nu_arr + t_sq))
    half_tail = 0.5 * np.asarray(reg_inc_beta(0.5 * nu_arr, 0.5, x))
    out = np.where(t_arr >= 0, half_tail, 1.0 - half_tail)
    return _as_output(out, t, nu)


def student_t_cdf(t, nu):
    """CDF of Student's t with nu degrees of freedom; cdf(t) + cdf(-t) = 1."""
    t_arr = np.asarray(t, dtype=np.float64)
    return _as_output(np.asarray(student_t_sf(-t_arr, nu)), t, nu)


def normal_cdf(x):
    return _as_output(special.ndtr(np.asarray(x, dtype=np.float64)), x)


def normal_quantile(p):
    p_arr = np.asarray(p, dtype=np.float64)
    if np.any(~((p_arr > 0) & (p_arr < 1))):
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    return _as_output(special.ndtri(p_arr), p)


def cauchy_cdf(x):
    return _as_output(0.5 + np.arctan(np.asarray(x, dtype=np.float64)) / np.pi, x)


def invert_monotone(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    tol: float = ROOT_TOL,
    max_iter: int = 400,
) -> float:
    """
    Bisection for a monotone f on [lo, hi].

    Returns the smallest x (to within tol) at which f has reached target:
    f(x) >= target when f increases, f(x) <= target when f decreases. The
    returned endpoint always satisfies that condition, so jumps resolve to the
    left-continuous inverse.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not lo <= hi:
        raise DomainError(f"empty bracket [{lo}, {hi}]")
    f_lo, f_hi = f(lo), f(hi)
    if not min(f_lo, f_hi) <= target <= max(f_lo, f_hi):
        raise BracketError(f"target {target} outside [f(lo), f(hi)] = [{f_lo}, {f_hi}]")
    increasing = f_hi >= f_lo

    def reached(value: float) -> bool:
        return value >= target if increasing else value <= target

    if reached(f_lo):
        return lo
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if reached(f(mid)):
            hi = mid
        else:
            lo = mid
    return hi
