import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruinkit.distributions import DistributionSpec
from ruinkit.errors import ParameterDomainError
from ruinkit.ruin_engine import (
    ExposurePolicy,
    WalkSpec,
    exposures_to_ruin_level,
    gambler_ruin_closed_form,
    log2_bin_counts,
    repeated_exposure_ruin,
    simulate_absorbing_walk,
    simulate_repeated_exposure,
    wilson_interval,
)

mp.mp.dps = 50


def mp_repeated(p: str, n: int) -> float:
    return float(1 - (1 - mp.mpf(p)) ** n)


# frozen from mp_repeated
REPEATED = {
    ("1e-4", 10_000): 0.63213895356707007589,
    ("0.01", 50): 0.39499393286246334955,
    ("1e-9", 1_000_000): 0.00099950016712450858219,
}


@pytest.mark.parametrize("p, n", sorted(REPEATED))
def test_repeated_exposure_against_high_precision(p, n):
    got = repeated_exposure_ruin(ExposurePolicy(float(p), n))
    assert got == pytest.approx(REPEATED[(p, n)], rel=1e-12)
    assert got == pytest.approx(mp_repeated(p, n), rel=1e-12)


def test_repeated_exposure_trivial():
    assert repeated_exposure_ruin(ExposurePolicy(0.0, 10**9)) == 0.0
    assert repeated_exposure_ruin(ExposurePolicy(0.37, 1)) == pytest.approx(0.37, rel=1e-15)
    assert repeated_exposure_ruin(ExposurePolicy(0.37, 0)) == 0.0
    assert repeated_exposure_ruin(ExposurePolicy(1.0, 3)) == 1.0


@settings(max_examples=100, deadline=None)
@given(
    p1=st.floats(0, 1),
    p2=st.floats(0, 1),
    n1=st.integers(0, 10**7),
    n2=st.integers(0, 10**7),
)
def test_repeated_exposure_monotone(p1, p2, n1, n2):
    lo_p, hi_p = sorted((p1, p2))
    lo_n, hi_n = sorted((n1, n2))
    assert repeated_exposure_ruin(ExposurePolicy(lo_p, lo_n)) <= repeated_exposure_ruin(
        ExposurePolicy(hi_p, lo_n)
    )
    assert repeated_exposure_ruin(ExposurePolicy(lo_p, lo_n)) <= repeated_exposure_ruin(
        ExposurePolicy(lo_p, hi_n)
    )


def test_exposure_policy_domain():
    with pytest.raises(ParameterDomainError):
        ExposurePolicy(-0.1, 3)
    with pytest.raises(ParameterDomainError):
        ExposurePolicy(0.1, -3)


def test_exposures_to_ruin_level():
    assert exposures_to_ruin_level(1e-4, 0.5) == 6932
    assert exposures_to_ruin_level(0.5, 0.5) == 1
    targets = [0.5, 0.9, 0.99, 0.999999]
    ns = [exposures_to_ruin_level(1e-4, t) for t in targets]
    assert ns == sorted(ns) and len(set(ns)) == len(ns)
    for t, n in zip(targets, ns):
        assert repeated_exposure_ruin(ExposurePolicy(1e-4, n)) >= t
        assert repeated_exposure_ruin(ExposurePolicy(1e-4, n - 1)) < t
    for bad in (0.0, 1.0):
        with pytest.raises(ParameterDomainError):
            exposures_to_ruin_level(bad, 0.5)
        with pytest.raises(ParameterDomainError):
            exposures_to_ruin_level(0.1, bad)


def test_gambler_closed_form_examples():
    assert gambler_ruin_closed_form(5, 10, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert gambler_ruin_closed_form(1, 2, 0.6) == pytest.approx(0.4, rel=1e-12)
    assert gambler_ruin_closed_form(7, None, 0.5) == 1.0
    assert gambler_ruin_closed_form(3, None, 0.4) == 1.0
    assert gambler_ruin_closed_form(3, None, 0.6) == pytest.approx((2 / 3) ** 3)
    with pytest.raises(ParameterDomainError):
        gambler_ruin_closed_form(10, 10, 0.5)
    with pytest.raises(ParameterDomainError):
        gambler_ruin_closed_form(0, 10, 0.5)


def first_step_solution(a: int, upper: int, p_up: float) -> float:
    """Solve r_i = p r_{i+1} + q r_{i-1}, r_0 = 1, r_N = 0 as a linear system."""
    n = upper - 1
    m = np.zeros((n, n))
    rhs = np.zeros(n)
    for i in range(n):
        m[i, i] = 1.0
        if i + 1 < n:
            m[i, i + 1] = -p_up
        if i > 0:
            m[i, i - 1] = -(1 - p_up)
        else:
            rhs[i] = 1 - p_up
    return float(np.linalg.solve(m, rhs)[a - 1])


@pytest.mark.parametrize("a, upper, p_up", [(1, 2, 0.6), (3, 7, 0.45), (5, 10, 0.5), (2, 12, 0.51)])
def test_gambler_closed_form_matches_linear_system(a, upper, p_up):
    assert gambler_ruin_closed_form(a, upper, p_up) == pytest.approx(
        first_step_solution(a, upper, p_up), rel=1e-9
    )


def test_walk_degenerate_step():
    eps = 1e-3
    spec = WalkSpec(start=eps, step=DistributionSpec.bernoulli(0.0, loc=-eps))
    rep = simulate_absorbing_walk(spec, 1000, seed=0)
    assert rep.ruin_probability == 1.0
    assert [(b.bin_lo, b.count) for b in rep.time_to_ruin] == [(1, 1000)]
    with pytest.raises(ParameterDomainError):
        WalkSpec(start=0.0, step=DistributionSpec.gaussian())


@pytest.mark.parametrize("a, upper, p_up", [(5, 10, 0.5), (1, 2, 0.6), (3, 8, 0.45)])
def test_walk_matches_gambler(a, upper, p_up):
    reps = 100_000
    spec = WalkSpec(a, DistributionSpec.plus_minus_one(p_up), upper_barrier=upper)
    rep = simulate_absorbing_walk(spec, reps, seed=1)
    exact = gambler_ruin_closed_form(a, upper, p_up)
    assert abs(rep.ruin_probability - exact) <= 3 * math.sqrt(exact * (1 - exact) / reps)
    assert rep.ruined + rep.absorbed_upper + rep.survived_at_cap == reps
    assert rep.survived_at_cap == 0
    lo, hi = rep.ci95
    assert lo <= rep.ruin_probability <= hi
    assert rep.histogram_mass == pytest.approx(rep.ruin_probability)


def test_walk_within_three_se_in_most_trials():
    a, upper, p_up, reps, trials = 3, 6, 0.55, 2000, 200
    exact = gambler_ruin_closed_form(a, upper, p_up)
    se = math.sqrt(exact * (1 - exact) / reps)
    spec = WalkSpec(a, DistributionSpec.plus_minus_one(p_up), upper_barrier=upper)
    hits = sum(
        abs(simulate_absorbing_walk(spec, reps, seed=s).ruin_probability - exact) <= 3 * se
        for s in range(trials)
    )
    assert hits >= 0.99 * trials


def test_absorption_is_permanent():
    spec = WalkSpec(2.0, DistributionSpec.gaussian(0.0, 1.0), horizon=60)
    rep = simulate_absorbing_walk(spec, 500, seed=3, record_paths=True)
    assert len(rep.paths) == 500
    ruined = 0
    for path in rep.paths:
        below = np.flatnonzero(path <= spec.barrier)
        if below.size:
            ruined += 1
            t = below[0]
            assert np.all(path[t:] == path[t])
    assert ruined == rep.ruined


def test_fat_steps_ruin_more():
    kw = dict(start=1.0, horizon=1000)
    cauchy = simulate_absorbing_walk(WalkSpec(step=DistributionSpec.cauchy(0.1, 0.1), **kw), 20_000, seed=4)
    gauss = simulate_absorbing_walk(WalkSpec(step=DistributionSpec.gaussian(0.1, 0.1), **kw), 20_000, seed=4)
    assert cauchy.ruin_probability > gauss.ruin_probability
    assert cauchy.ci95[0] > gauss.ci95[1]


def test_ruin_monotone_in_horizon_and_start():
    step = DistributionSpec.plus_minus_one(0.5)
    probs = [
        simulate_absorbing_walk(WalkSpec(4, step, horizon=h), 20_000, seed=5).ruin_probability
        for h in (10, 50, 200, 1000)
    ]
    assert probs == sorted(probs)
    near = simulate_absorbing_walk(WalkSpec(2, step, upper_barrier=10), 20_000, seed=5)
    far = simulate_absorbing_walk(WalkSpec(8, step, upper_barrier=10), 20_000, seed=5)
    assert near.ruin_probability > far.ruin_probability


def test_horizon_cap_flags_survivors():
    spec = WalkSpec(50, DistributionSpec.plus_minus_one(0.5))
    rep = simulate_absorbing_walk(spec, 1000, seed=6, horizon_cap=100)
    # cannot reach 0 from 50 in fewer than 50 steps, and most paths survive 100 steps
    assert rep.horizon == 100
    assert rep.survived_at_cap + rep.ruined == 1000
    assert rep.survived_at_cap > 900
    assert all(b.bin_lo >= 32 for b in rep.time_to_ruin if b.count)


def test_walk_worker_independent():
    spec = WalkSpec(5, DistributionSpec.plus_minus_one(0.5), upper_barrier=10)
    a = simulate_absorbing_walk(spec, 30_000, seed=8, workers=1)
    b = simulate_absorbing_walk(spec, 30_000, seed=8, workers=3)
    assert a.to_dict() == b.to_dict()


def test_log2_bins():
    counts = log2_bin_counts(np.array([1, 2, 3, 4, 7, 8, 1023, 1024]))
    assert counts.tolist() == [1, 2, 2, 1, 0, 0, 0, 0, 0, 1, 1]
    assert log2_bin_counts(np.array([], dtype=int)).size == 0


def test_repeated_exposure_simulation():
    policy = ExposurePolicy(1e-4, 10_000)
    reps = 100_000
    rep = simulate_repeated_exposure(policy, reps, seed=0)
    exact = repeated_exposure_ruin(policy)
    assert abs(rep.ruin_probability - exact) <= 3 * math.sqrt(exact * (1 - exact) / reps)
    assert rep.histogram_mass == pytest.approx(rep.ruin_probability)
    assert max(b.bin_lo for b in rep.time_to_ruin if b.count) <= 10_000
    zero = simulate_repeated_exposure(ExposurePolicy(0.0, 10), 100, seed=0)
    assert zero.ruin_probability == 0.0 and zero.ci95[0] == 0.0


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 10**6), frac=st.floats(0, 1))
def test_wilson_contains_estimate(n, frac):
    k = int(round(frac * n))
    lo, hi = wilson_interval(k, n)
    assert 0 <= lo <= k / n <= hi <= 1
