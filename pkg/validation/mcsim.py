"""
Monte Carlo checks for the robust critical values.

Errors are xi = s * eta with a random scale s >= 0 independent of eta. Gaussian
kinds use eta ~ N(0, 1); rademacher uses eta = +-1 with s = 1. Two checks:

* type_one_error: two-sided rejection rate under H0 with the model's
  one-sided level-alpha critical value; should not exceed 2 alpha.
* adversarial_attainment: k unit scales and n - k negligible scales, with k
  the maximizer of the scale-mixture tail; the rejection rate should match
  2 g_tail, showing the bound is attained.

Rejection uses the ratio form (sum xi)^2 / sum xi^2 > a^2, equivalent to
|T| > x and still defined when every error is equal (S = 0, |T| infinite).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from models import gmix
from models.robust_test import FINITE_MODELS, critical_value
from numerics.transform import a_from_x, ratio_statistics
from utils.errors import DomainError, SpecError
from validation.streams import DEFAULT_BLOCK_SIZE, block_generator, iter_blocks

logger = logging.getLogger(__name__)

MIN_REPS = 10_000
ADVERSARIAL_EPSILON = 1e-9
CONSERVATIVE_SE = 3.0
ATTAINMENT_SE = 4.0

# kind -> (parameter names, defaults)
KINDS: Dict[str, Tuple[Tuple[str, ...], Tuple[float, ...]]] = {
    "constant_scale": (("sigma",), (1.0,)),
    "two_point_scale": (("small", "large", "weight"), (1.0, 10.0, 0.5)),
    "exponential_scale": (("b",), (1.0,)),
    "inverse_sqrt_gamma_scale": (("nu",), (3.0,)),
    "rademacher": ((), ()),
}
GAUSSIAN_KINDS = ("constant_scale", "two_point_scale", "exponential_scale", "inverse_sqrt_gamma_scale")


@dataclass(frozen=True)
class MixtureSpec:
    """
    Error law xi = s * eta.

    two_point_scale(small, large, weight): s = large with probability weight, else small.
    exponential_scale(b): s^2 ~ Exponential(mean 2 b^2), giving Laplace(0, b) errors.
    inverse_sqrt_gamma_scale(nu): s = sqrt(nu / chi2_nu), giving Student t_nu errors.
    """

    kind: str
    params: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown mixture kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        names, defaults = KINDS[self.kind]
        params = tuple(float(p) for p in self.params) if self.params else defaults
        if len(params) != len(names):
            raise SpecError(f"{self.kind} takes {len(names)} parameter(s) {names}, got {len(params)}")
        object.__setattr__(self, "params", params)
        self._validate()

    def _validate(self) -> None:
        values = dict(zip(KINDS[self.kind][0], self.params))
        for name, value in values.items():
            if not math.isfinite(value):
                raise SpecError(f"{self.kind}: {name} must be finite, got {value}")
        if self.kind == "constant_scale" and values["sigma"] <= 0:
            raise SpecError("constant_scale: sigma must be positive")
        if self.kind == "two_point_scale":
            if values["small"] < 0 or values["large"] < 0:
                raise SpecError("two_point_scale: scales must be nonnegative")
            if not 0 <= values["weight"] <= 1:
                raise SpecError("two_point_scale: weight must lie in [0, 1]")
            if values["small"] == 0 and values["large"] == 0:
                raise SpecError("two_point_scale: at least one scale must be positive")
        if self.kind == "exponential_scale" and values["b"] <= 0:
            raise SpecError("exponential_scale: b must be positive")
        if self.kind == "inverse_sqrt_gamma_scale" and values["nu"] <= 0:
            raise SpecError("inverse_sqrt_gamma_scale: nu must be positive")

    @classmethod
    def parse(cls, text: str) -> "MixtureSpec":
        """'kind' or 'kind:p1,p2,...', e.g. 'two_point_scale:1,10,0.5'."""
        kind, _, rest = text.strip().partition(":")
        try:
            params = tuple(float(p) for p in rest.split(",") if p.strip())
        except ValueError as exc:
            raise SpecError(f"cannot parse mixture parameters in {text!r}") from exc
        return cls(kind=kind.strip(), params=params)

    @property
    def is_gaussian(self) -> bool:
        return self.kind in GAUSSIAN_KINDS

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in self.params)


def builtin_specs() -> Tuple[MixtureSpec, ...]:
    """The four Gaussian kinds with their default parameters."""
    return tuple(MixtureSpec(kind) for kind in GAUSSIAN_KINDS)


@dataclass(frozen=True)
class SimulationReport:
    spec: MixtureSpec
    n: int
    alpha: float
    model: str
    reps: int
    rejections: int
    seed: int
    critical_value: float
    provenance: str
    mu: float = 0.0
    estimate: float = field(init=False)
    std_error: float = field(init=False)

    def __post_init__(self):
        estimate = self.rejections / self.reps
        object.__setattr__(self, "estimate", estimate)
        object.__setattr__(self, "std_error", math.sqrt(estimate * (1.0 - estimate) / self.reps))

    @property
    def nominal(self) -> float:
        """Two-sided nominal level 2 alpha."""
        return 2.0 * self.alpha

    @property
    def conservative(self) -> bool:
        return self.estimate <= self.nominal + CONSERVATIVE_SE * self.std_error


@dataclass(frozen=True)
class AttainmentReport:
    n: int
    a: float
    k: int
    reps: int
    hits: int
    seed: int
    epsilon: float
    theoretical: float
    empirical: float = field(init=False)
    std_error: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "empirical", self.hits / self.reps)
        p = self.theoretical
        object.__setattr__(self, "std_error", math.sqrt(max(p * (1.0 - p), 0.0) / self.reps))

    @property
    def consistent(self) -> bool:
        return abs(self.empirical - self.theoretical) <= ATTAINMENT_SE * self.std_error


def _draw(spec: MixtureSpec, shape: Tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "rademacher":
        return rng.choice(np.array([-1.0, 1.0]), size=shape)
    eta = rng.standard_normal(shape)
    if spec.kind == "constant_scale":
        return spec.params[0] * eta
    if spec.kind == "two_point_scale":
        small, large, weight = spec.params
        scales = np.where(rng.random(shape) < weight, large, small)
    elif spec.kind == "exponential_scale":
        (b,) = spec.params
        scales = np.sqrt(rng.exponential(2.0 * b * b, size=shape))
    else:
        (nu,) = spec.params
        scales = np.sqrt(nu / rng.chisquare(nu, size=shape))
    return scales * eta


def sample_errors(spec: MixtureSpec, n: int, stream: np.random.Generator) -> np.ndarray:
    """n independent errors from spec, drawn from stream."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return _draw(spec, (1, int(n)), stream)[0]


def sample_block(spec: MixtureSpec, n: int, seed: int, block: int, block_size: int = DEFAULT_BLOCK_SIZE) -> np.ndarray:
    """(block_size, n) errors for one replication block; rows are replications."""
    return _draw(spec, (block_size, n), block_generator(seed, block))


def _rejections(errors: np.ndarray, a_sq: float) -> int:
    return int(np.count_nonzero(ratio_statistics(errors) > a_sq))


def type_one_error(
    spec: MixtureSpec,
    n: int,
    alpha: float,
    model: str,
    reps: int,
    seed: int,
    mu: float = 0.0,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> SimulationReport:
    """
    Two-sided rejection rate under H0 for X_i = mu + xi_i.

    Each replication block is drawn in full and truncated, so replication i is
    the same whatever reps is. Location invariance of the event lets the test run
    on the errors directly, so mu only labels the report.
    """
    if model not in FINITE_MODELS:
        raise DomainError(f"unknown model {model!r}; expected one of {', '.join(FINITE_MODELS)}")
    if int(reps) != reps or reps < MIN_REPS:
        raise DomainError(f"reps must be an integer >= {MIN_REPS}, got {reps}")
    cv = critical_value(model, n, alpha)
    a_sq = a_from_x(cv.x, n) ** 2

    rejections = 0
    for block, count in iter_blocks(reps, block_size):
        errors = sample_block(spec, n, seed, block, block_size)[:count]
        rejections += _rejections(errors, a_sq)

    report = SimulationReport(
        spec=spec,
        n=n,
        alpha=alpha,
        model=model,
        reps=int(reps),
        rejections=rejections,
        seed=int(seed),
        critical_value=cv.x,
        provenance=cv.provenance,
        mu=float(mu),
    )
    logger.info(
        "%s n=%d alpha=%g model=%s: %d/%d rejections (%.5f +- %.5f, nominal %.4f)",
        spec.label, n, alpha, model, rejections, reps, report.estimate, report.std_error, report.nominal,
    )
    if spec.is_gaussian and model == "G" and not report.conservative:
        logger.warning("%s n=%d alpha=%g: rejection rate %.5f above 2 alpha + 3 SE", spec.label, n, alpha, report.estimate)
    return report


def adversarial_attainment(
    n: int,
    a: float,
    reps: int,
    seed: int,
    epsilon: float = ADVERSARIAL_EPSILON,
    block_size: int = DEFAULT_BLOCK_SIZE,
    k: Optional[int] = None,
) -> AttainmentReport:
    """
    P{ratio > a^2} with k unit scales and n - k scales equal to epsilon.

    k defaults to g_argmax_k(a, n); theoretical is 2 g_tail(a, n) (the one-sided
    tail doubled for the two-sided event).
    """
    if not (1.0 < a and a * a < n):
        raise DomainError(f"adversarial_attainment needs 1 < a < sqrt(n) = {math.sqrt(n):.6g}, got {a}")
    if int(reps) != reps or reps < 1:
        raise DomainError(f"reps must be a positive integer, got {reps}")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    k = gmix.g_argmax_k(a, n) if k is None else int(k)
    scales = np.full(n, float(epsilon))
    scales[:k] = 1.0
    a_sq = a * a

    hits = 0
    for block, count in iter_blocks(reps, block_size):
        rng = block_generator(seed, block)
        errors = scales * rng.standard_normal((block_size, n))
        hits += _rejections(errors[:count], a_sq)

    # the k-term alone when k is forced, otherwise the max over k
    if k == gmix.g_argmax_k(a, n):
        tail = gmix.g_tail(a, n)
    else:
        ks, tails = gmix.g_terms(a, n)
        tail = float(tails[list(ks).index(k)]) if k in ks else 0.0
    report = AttainmentReport(
        n=n, a=a, k=k, reps=int(reps), hits=hits, seed=int(seed), epsilon=float(epsilon), theoretical=2.0 * tail
    )
    if not report.consistent:
        logger.warning(
            "attainment n=%d a=%.4f k=%d: empirical %.5f vs theoretical %.5f (SE %.5f)",
            n, a, k, report.empirical, report.theoretical, report.std_error,
        )
    else:
        logger.info("attainment n=%d a=%.4f k=%d: %.5f vs %.5f", n, a, k, report.empirical, report.theoretical)
    return report
