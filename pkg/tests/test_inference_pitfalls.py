import math

import numpy as np
import pytest
from scipy import stats

from ruinkit.distributions import DistributionSpec, sample
from ruinkit.errors import ParameterDomainError
from ruinkit.inference_pitfalls import (
    QUADRANTS,
    difference_stats,
    effect_for_power,
    luck_quadrant_sim,
    two_test_fallacy_sim,
    z_test_power,
)

N = 200_000


def test_variance_of_difference():
    x = sample(DistributionSpec.gaussian(1, 1), N, seed=1)
    y = sample(DistributionSpec.gaussian(1, 1), N, seed=2)
    rep = difference_stats(x, y)
    assert rep.correct.variance == pytest.approx(2.0, abs=0.03)
    assert rep.naive.variance == pytest.approx(0.0, abs=0.03)
    assert rep.flags["variance_discrepancy"]


def test_cv_of_difference():
    x = sample(DistributionSpec.gaussian(2, 1), N, seed=3)
    y = sample(DistributionSpec.gaussian(1, 2), N, seed=4)
    for mode in ("paired", "independent"):
        rep = difference_stats(x, y, mode=mode)
        assert rep.correct.cv == pytest.approx(1 / math.sqrt(5), abs=0.01)
        assert rep.naive.cv == pytest.approx(1.5, abs=0.01)
        assert rep.naive.variance < 0
        assert rep.flags["naive_variance_negative"] and rep.flags["cv_discrepancy"]


def test_identical_paired():
    x = sample(DistributionSpec.gaussian(), 1000, seed=5)
    rep = difference_stats(x, x)
    assert rep.correct.mean == 0.0 and rep.correct.variance == 0.0
    assert rep.correct.cv is None and rep.flags["cv_undefined"]


@pytest.mark.parametrize(
    "sx, sy", [((0, 1), (0, 3)), ((5, 2), (1, 4)), ((-1, 0.5), (2, 0.7)), ((0, 1), (0, 1))]
)
def test_correct_variance_nonnegative(sx, sy):
    x = sample(DistributionSpec.gaussian(*sx), 5000, seed=6)
    y = sample(DistributionSpec.gaussian(*sy), 5000, seed=7)
    for mode in ("paired", "independent"):
        rep = difference_stats(x, y, mode=mode)
        assert rep.correct.variance >= 0
    if sx[1] < sy[1]:
        assert rep.naive.variance < 0


def test_independent_mode_unequal_lengths():
    x = sample(DistributionSpec.gaussian(0, 1), 50_000, seed=8)
    y = sample(DistributionSpec.gaussian(0, 1), 7_000, seed=9)
    rep = difference_stats(x, y, mode="independent", seed=3)
    assert rep.n == 50_000
    assert rep.correct.variance == pytest.approx(2.0, abs=0.1)
    assert difference_stats(x, y, mode="independent", seed=3) == rep
    with pytest.raises(ParameterDomainError):
        difference_stats(x, y, mode="paired")
    with pytest.raises(ParameterDomainError):
        difference_stats([1.0], [1.0, 2.0], mode="independent")


def test_power_helpers():
    n = 20
    e = effect_for_power(0.5, n)
    # the opposite rejection region adds Phi(-2 z_crit) above 0.5
    far = stats.norm.cdf(-2 * stats.norm.ppf(0.975))
    assert z_test_power(e, n) == pytest.approx(0.5 + far, rel=1e-12)
    assert z_test_power(0.0, n, alpha=0.05) == pytest.approx(0.05, rel=1e-12)


def test_two_test_half_power():
    n, alpha, reps = 20, 0.05, 200_000
    e = effect_for_power(0.5, n, alpha)
    rep = two_test_fallacy_sim(e, e, n, alpha, reps, seed=1)
    p = z_test_power(e, n, alpha)
    se = math.sqrt(0.25 / reps)
    assert abs(rep.incorrect_rate - 2 * p * (1 - p)) < 4 * se
    assert abs(rep.correct_rate - alpha) < 4 * math.sqrt(alpha * (1 - alpha) / reps)
    assert abs(rep.significant_x_rate - p) < 4 * se


def test_two_test_null():
    alpha, reps = 0.05, 200_000
    rep = two_test_fallacy_sim(0.0, 0.0, 30, alpha, reps, seed=2)
    expected = 2 * alpha * (1 - alpha)
    assert abs(rep.incorrect_rate - expected) < 4 * math.sqrt(expected * (1 - expected) / reps)
    assert abs(rep.correct_rate - alpha) < 4 * math.sqrt(alpha * (1 - alpha) / reps)


def test_two_test_grid():
    n, alpha = 25, 0.05
    for power in np.linspace(0.12, 0.88, 9):
        e = effect_for_power(power, n, alpha)
        rep = two_test_fallacy_sim(e, e, n, alpha, 20_000, seed=3)
        assert rep.incorrect_rate > rep.correct_rate


def test_two_test_errors_and_determinism():
    with pytest.raises(ParameterDomainError):
        two_test_fallacy_sim(0, 0, 20, replicates=0)
    with pytest.raises(ParameterDomainError):
        two_test_fallacy_sim(0, 0, 1)
    with pytest.raises(ParameterDomainError):
        two_test_fallacy_sim(0, 0, 20, alpha=1.0)
    a = two_test_fallacy_sim(0.3, 0.1, 20, replicates=30_000, seed=7)
    b = two_test_fallacy_sim(0.3, 0.1, 20, replicates=30_000, seed=7, workers=4)
    assert a == b


def folded_normal_mean(mu: float, sigma: float) -> float:
    return sigma * math.sqrt(2 / math.pi) * math.exp(-mu * mu / (2 * sigma * sigma)) + mu * (
        1 - 2 * stats.norm.cdf(-mu / sigma)
    )


def test_luck_quadrants_equal_odds():
    reps = 200_000
    rep = luck_quadrant_sim(0.5, reps, seed=1)
    for q in QUADRANTS:
        assert abs(rep.frequencies[q] - 0.25) < 4 * math.sqrt(0.25 * 0.75 / reps)
    assert sum(rep.frequencies.values()) == pytest.approx(1.0)
    matched = folded_normal_mean(0.0, math.sqrt(2))
    mixed = folded_normal_mean(2.0, math.sqrt(2))
    for q in ("lucky-lucky", "unlucky-unlucky"):
        assert rep.mean_gap[q] == pytest.approx(matched, rel=0.02)
    for q in ("lucky-unlucky", "unlucky-lucky"):
        assert rep.mean_gap[q] == pytest.approx(mixed, rel=0.02)
    assert min(rep.mean_gap[q] for q in QUADRANTS[1:3]) > max(
        rep.mean_gap[q] for q in (QUADRANTS[0], QUADRANTS[3])
    )


def test_luck_all_lucky():
    rep = luck_quadrant_sim(1.0, 5000, seed=2)
    assert rep.frequencies["lucky-lucky"] == 1.0
    assert rep.mean_gap["lucky-unlucky"] is None
    with pytest.raises(ParameterDomainError):
        luck_quadrant_sim(1.5)


def test_luck_determinism():
    assert luck_quadrant_sim(0.3, 20_000, seed=4) == luck_quadrant_sim(0.3, 20_000, seed=4)
    assert luck_quadrant_sim(0.3, 20_000, seed=4) != luck_quadrant_sim(0.3, 20_000, seed=5)
