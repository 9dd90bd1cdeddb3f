"""Monte Carlo harness: error laws, reproducible streams, type-I error and attainment."""
import math

import numpy as np
import pytest
from scipy import stats

from models.gmix import g_tail
from validation.mcsim import (
    MIN_REPS,
    MixtureSpec,
    adversarial_attainment,
    builtin_specs,
    sample_block,
    sample_errors,
    type_one_error,
)
from validation.streams import block_generator, iter_blocks
from utils.errors import DomainError, SpecError

REPS = 20_000
ACCEPTANCE_REPS = 100_000


def test_iter_blocks_covers_reps():
    blocks = list(iter_blocks(2_500, 1_000))
    assert blocks == [(0, 1_000), (1, 1_000), (2, 500)]
    assert list(iter_blocks(0, 1_000)) == []


def test_block_streams_reproducible_and_distinct():
    first = block_generator(42, 3).standard_normal(5)
    again = block_generator(42, 3).standard_normal(5)
    other_block = block_generator(42, 4).standard_normal(5)
    other_seed = block_generator(43, 3).standard_normal(5)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other_block)
    assert not np.array_equal(first, other_seed)


def test_block_generator_rejects_bad_seed():
    with pytest.raises(DomainError):
        block_generator(-1, 0)
    with pytest.raises(DomainError):
        block_generator(1, -2)


def test_spec_parse_and_defaults():
    spec = MixtureSpec.parse("two_point_scale:1,10,0.5")
    assert spec.params == (1.0, 10.0, 0.5)
    assert spec.label == "two_point_scale:1,10,0.5"
    assert MixtureSpec.parse("exponential_scale").params == (1.0,)
    assert MixtureSpec("rademacher").label == "rademacher"
    assert not MixtureSpec("rademacher").is_gaussian
    assert all(spec.is_gaussian for spec in builtin_specs())


@pytest.mark.parametrize(
    "text",
    ["student:3", "two_point_scale:1,10", "two_point_scale:1,10,1.5", "constant_scale:0", "exponential_scale:x"],
)
def test_spec_parse_errors(text):
    with pytest.raises(SpecError):
        MixtureSpec.parse(text)


def test_sample_errors_moments():
    rng = np.random.default_rng(8)
    laplace = sample_errors(MixtureSpec("exponential_scale"), 200_000, rng)
    assert abs(laplace.mean()) < 0.02
    assert laplace.var() == pytest.approx(2.0, rel=0.03)
    assert stats.kurtosis(laplace, fisher=False) > 5.0

    student = sample_errors(MixtureSpec("inverse_sqrt_gamma_scale", (10.0,)), 200_000, rng)
    assert student.var() == pytest.approx(10.0 / 8.0, rel=0.03)
    assert stats.kurtosis(student, fisher=False) > 3.3

    two_point = sample_errors(MixtureSpec("two_point_scale"), 200_000, rng)
    assert abs(two_point.mean()) < 0.1
    assert stats.kurtosis(two_point, fisher=False) > 5.0

    signs = sample_errors(MixtureSpec("rademacher"), 1_000, rng)
    assert set(np.unique(signs)) <= {-1.0, 1.0}


def test_sample_errors_domain():
    with pytest.raises(DomainError):
        sample_errors(MixtureSpec("constant_scale"), 0, np.random.default_rng(0))


def test_sample_block_shape_and_repeatability():
    spec = MixtureSpec("exponential_scale")
    block = sample_block(spec, 7, seed=11, block=2, block_size=50)
    assert block.shape == (50, 7)
    np.testing.assert_array_equal(block, sample_block(spec, 7, seed=11, block=2, block_size=50))


def test_type_one_error_reproducible():
    spec = MixtureSpec("two_point_scale")
    first = type_one_error(spec, 11, 0.025, "G", REPS, seed=7)
    second = type_one_error(spec, 11, 0.025, "G", REPS, seed=7)
    assert first == second
    longer = type_one_error(spec, 11, 0.025, "G", REPS + 500, seed=7)
    # the first REPS replications are shared, only new ones can add rejections
    assert longer.rejections >= first.rejections


def test_type_one_error_records_mu():
    spec = MixtureSpec("exponential_scale")
    shifted = type_one_error(spec, 6, 0.05, "G", MIN_REPS, seed=12, mu=2.5)
    centred = type_one_error(spec, 6, 0.05, "G", MIN_REPS, seed=12)
    assert shifted.mu == 2.5
    assert centred.mu == 0.0
    # the rejection event is location invariant
    assert shifted.rejections == centred.rejections


def test_type_one_error_rejects_small_reps():
    with pytest.raises(DomainError):
        type_one_error(MixtureSpec("constant_scale"), 5, 0.05, "G", MIN_REPS - 1, seed=1)
    with pytest.raises(DomainError):
        type_one_error(MixtureSpec("constant_scale"), 5, 0.05, "phiG", MIN_REPS, seed=1)


@pytest.mark.slow
@pytest.mark.parametrize("spec", builtin_specs(), ids=lambda spec: spec.kind)
@pytest.mark.parametrize("n", [3, 11, 26])
@pytest.mark.parametrize("alpha", [0.025, 0.05])
def test_g_critical_values_conservative(spec, n, alpha):
    report = type_one_error(spec, n, alpha, "G", ACCEPTANCE_REPS, seed=2024)
    assert report.nominal == 2.0 * alpha
    assert report.conservative, (report.estimate, report.std_error)


def test_classical_calibrated_under_constant_scale():
    report = type_one_error(MixtureSpec("constant_scale"), 11, 0.025, "classic", REPS, seed=5)
    assert report.estimate == pytest.approx(0.05, abs=4.0 * math.sqrt(0.05 * 0.95 / REPS))


def test_g_equals_classic_at_small_alpha():
    spec = MixtureSpec("constant_scale")
    classic = type_one_error(spec, 11, 0.025, "classic", REPS, seed=5)
    robust = type_one_error(spec, 11, 0.025, "G", REPS, seed=5)
    assert robust.critical_value == pytest.approx(classic.critical_value, abs=1e-6)
    assert robust.rejections == classic.rejections


def test_symmetric_model_on_sign_errors():
    report = type_one_error(MixtureSpec("rademacher"), 4, 1.0 / 16.0, "S", REPS, seed=3)
    assert report.critical_value == pytest.approx(3.0)
    assert report.provenance == "exact"
    # only the two all-equal sign patterns exceed x = 3
    assert report.estimate == pytest.approx(0.125, abs=4.0 * math.sqrt(0.125 * 0.875 / REPS))
    assert report.estimate <= report.nominal + 3.0 * report.std_error


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, a",
    [(10, 1.2), (10, 2.5), (3, 1.5), (4, 1.1), (5, 1.9), (11, 1.45), (26, 1.3), (26, 1.6), (26, 2.2), (100, 1.7)],
)
def test_adversarial_attainment(n, a):
    report = adversarial_attainment(n, a, ACCEPTANCE_REPS, seed=99)
    assert report.theoretical == pytest.approx(2.0 * g_tail(a, n))
    assert report.consistent, (report.empirical, report.theoretical, report.std_error)


def test_adversarial_forced_k_smaller_rate():
    best = adversarial_attainment(10, 1.2, REPS, seed=4)
    forced = adversarial_attainment(10, 1.2, REPS, seed=4, k=10)
    assert forced.k == 10
    assert forced.theoretical < best.theoretical


def test_adversarial_domain():
    with pytest.raises(DomainError):
        adversarial_attainment(10, 0.9, REPS, seed=1)
    with pytest.raises(DomainError):
        adversarial_attainment(4, 2.0, REPS, seed=1)
    with pytest.raises(DomainError):
        adversarial_attainment(10, 1.5, REPS, seed=1, epsilon=0.0)
