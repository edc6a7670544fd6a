import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruinkit.distributions import DistributionSpec
from ruinkit.errors import ConfigurationError
from ruinkit.sensitivity import (
    SweepConfig,
    family_label,
    horizon_ruin,
    information_ratio_sweep,
    per_period_ruin,
    scale_sweep,
    skepticism_pair,
    skepticism_report,
)

mp.mp.dps = 50

GAUSS = DistributionSpec.gaussian()
T2 = DistributionSpec.student_t(2.0)
CAUCHY = DistributionSpec.cauchy()

# frozen oracles: mpmath ncdf, 1/2 - atan(z)/pi, and the closed t2 tail
PHI_M11 = 1.9106595744986757e-28
PHI_M5_5 = 1.8989562465887719e-8
PHI_M1 = 0.15865525393145705
CAUCHY_11 = 0.028857938376304478
CAUCHY_5_5 = 0.057249147048700177
T2_11 = 0.0040817009329122407


def test_frozen_oracles():
    assert float(mp.ncdf(-11)) == pytest.approx(PHI_M11, rel=1e-15)
    assert float(mp.ncdf(-5.5)) == pytest.approx(PHI_M5_5, rel=1e-15)
    assert float(mp.mpf(1) / 2 - mp.atan(11) / mp.pi) == pytest.approx(CAUCHY_11, rel=1e-15)
    assert float((1 - 11 / mp.sqrt(123)) / 2) == pytest.approx(T2_11, rel=1e-15)


def test_scale_sweep_examples():
    assert per_period_ruin(GAUSS, 1.0, 1.0, 10.0) == pytest.approx(PHI_M11, rel=1e-12)
    assert abs(per_period_ruin(GAUSS, 1.0, 1.0, 10.0) - PHI_M11) < 1e-30
    assert per_period_ruin(GAUSS, 1.0, 2.0, 10.0) == pytest.approx(PHI_M5_5, rel=1e-12)
    assert per_period_ruin(CAUCHY, 1.0, 1.0, 10.0) == pytest.approx(CAUCHY_11, rel=1e-12)
    assert per_period_ruin(CAUCHY, 1.0, 2.0, 10.0) == pytest.approx(CAUCHY_5_5, rel=1e-12)
    assert per_period_ruin(T2, 1.0, 1.0, 10.0) == pytest.approx(T2_11, rel=1e-12)


def test_information_ratio_zero_benefit():
    res = information_ratio_sweep(SweepConfig(ir_grid=(0.0,), k=1.0))
    got = {r.family: r.per_period_ruin for r in res.rows}
    assert got["gaussian"] == pytest.approx(PHI_M1, rel=1e-12)
    assert got["cauchy"] == pytest.approx(0.25, rel=1e-12)
    assert got["student_t2"] == pytest.approx((1 - 1 / math.sqrt(3)) / 2, rel=1e-12)


def test_information_ratio_scaled_point():
    # IR = 1 at K = 10, sigma = 1 puts the barrier 11 scales below the benefit
    res = information_ratio_sweep(SweepConfig(ir_grid=(1.0,), k=10.0))
    got = {r.family: r for r in res.rows}
    assert abs(got["gaussian"].per_period_ruin - PHI_M11) < 1e-30
    assert got["cauchy"].per_period_ruin == pytest.approx(CAUCHY_11, abs=1e-6)
    assert got["gaussian"].mu == 1.0 and got["gaussian"].ir == 1.0


def test_sweep_ordering_and_labels():
    res = information_ratio_sweep(SweepConfig())
    fams = [r.family for r in res.rows]
    assert fams == ["gaussian"] * 6 + ["student_t2"] * 6 + ["cauchy"] * 6
    for fam in ("gaussian", "student_t2", "cauchy"):
        irs = [r.ir for r in res.by_family(fam)]
        assert irs == sorted(irs)
    assert family_label(DistributionSpec.student_t(1.5)) == "student_t1.5"


@pytest.mark.parametrize("template", [GAUSS, T2, CAUCHY, DistributionSpec.student_t(3.0)],
                         ids=family_label)
def test_monotone_in_sigma(template):
    sigmas = tuple(np.geomspace(0.1, 50, 40))
    rows = scale_sweep(SweepConfig(families=(template,), uncertainty_grid=sigmas)).rows
    p = [r.per_period_ruin for r in rows]
    assert all(b >= a for a, b in zip(p, p[1:]))
    assert p[-1] > p[0]


@pytest.mark.parametrize("template", [GAUSS, T2, CAUCHY], ids=family_label)
def test_strictly_decreasing_in_ir(template):
    irs = tuple(np.linspace(0, 15, 31))
    rows = information_ratio_sweep(SweepConfig(families=(template,), ir_grid=irs, k=5.0)).rows
    p = [r.per_period_ruin for r in rows]
    assert all(b < a for a, b in zip(p, p[1:]))


@settings(max_examples=200, deadline=None)
@given(p=st.floats(0, 1), horizon=st.integers(1, 10**6))
def test_horizon_identity(p, horizon):
    with mp.workdps(800):
        expected = float(1 - (1 - mp.mpf(p)) ** horizon)
    assert horizon_ruin(p, horizon) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_rows_satisfy_horizon_identity():
    cfg = SweepConfig(uncertainty_grid=(1.3,), horizon=250)
    rows = scale_sweep(cfg).rows
    assert len(rows) == 3
    for r in rows:
        expected = float(1 - (1 - mp.mpf(r.per_period_ruin)) ** 250)
        assert r.horizon_ruin == pytest.approx(expected, rel=1e-12)
        assert 0 <= r.per_period_ruin <= r.horizon_ruin <= 1


def test_family_ordering_default_grid():
    cfg = SweepConfig(k=10.0)
    for res in (scale_sweep(cfg), information_ratio_sweep(cfg)):
        g = res.by_family("gaussian")
        t = res.by_family("student_t2")
        c = res.by_family("cauchy")
        for a, b, d in zip(g, t, c):
            assert d.per_period_ruin > b.per_period_ruin > a.per_period_ruin


def test_fat_over_thin_factors():
    # z = (K + mu) / sigma is the standardized distance to the barrier
    for z in np.linspace(5, 60, 56):
        g = per_period_ruin(GAUSS, 1.0, 1.0, z - 1.0)
        t = per_period_ruin(T2, 1.0, 1.0, z - 1.0)
        c = per_period_ruin(CAUCHY, 1.0, 1.0, z - 1.0)
        assert c >= t >= g
        assert t >= 10 * g
        if z >= 16:
            assert c >= 10 * t
    # the cauchy to t2 ratio is close to 2z/pi, so it falls short of 10 at z = 11
    ratio = per_period_ruin(CAUCHY, 1.0, 1.0, 10.0) / per_period_ruin(T2, 1.0, 1.0, 10.0)
    assert ratio == pytest.approx(2 * 11 / math.pi, rel=0.01)


def test_skepticism_report():
    cfg = SweepConfig(uncertainty_grid=(1.0, 2.0), k=10.0)
    entries = {e.family: e for e in skepticism_report(cfg)}
    g = entries["gaussian"]
    hr = lambda q: 1 - (1 - mp.mpf(q)) ** 1000
    assert g.ratio == pytest.approx(float(hr(PHI_M5_5) / hr(PHI_M11)), rel=1e-9)
    assert 9e19 < g.ratio < 1.1e20
    assert g.per_period_hi <= 1.9e-8
    c = entries["cauchy"]
    assert c.per_period_lo == pytest.approx(CAUCHY_11, rel=1e-12)
    assert c.per_period_hi == pytest.approx(CAUCHY_5_5, rel=1e-12)
    # uncertainty raises ruin for every family
    assert all(e.ratio > 1 for e in entries.values())
    assert all(e.horizon_hi > e.horizon_lo for e in entries.values())


def test_skepticism_equal_sigma():
    e = skepticism_pair(CAUCHY, 1.0, 10.0, 2.0, 2.0)
    assert e.ratio == 1.0


def test_configuration_errors():
    with pytest.raises(ConfigurationError):
        per_period_ruin(GAUSS, 1.0, 1.0, -1.0)
    with pytest.raises(ConfigurationError):
        SweepConfig(uncertainty_grid=(2.0, 1.0))
    with pytest.raises(ConfigurationError):
        SweepConfig(uncertainty_grid=())
    with pytest.raises(ConfigurationError):
        SweepConfig(k=0.0)
    with pytest.raises(ConfigurationError):
        SweepConfig(families=(DistributionSpec.pareto(2.0),))
    with pytest.raises(ConfigurationError):
        skepticism_report(SweepConfig(uncertainty_grid=(1.0,)))
