"""Ruin probability against model uncertainty and against the information ratio.

A period is ruinous when its outcome X falls to -K or below. Uncertainty is
a mean-preserving spread: the location (the benefit) stays fixed while the
scale grows. The information ratio is benefit over scale. For Cauchy the
benefit is the location parameter, since there is no mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import DistributionSpec, cdf
from .errors import ConfigurationError

DEFAULT_FAMILIES = (
    DistributionSpec.gaussian(),
    DistributionSpec.student_t(2.0),
    DistributionSpec.cauchy(),
)
DEFAULT_SIGMAS = (0.5, 1.0, 2.0, 4.0)
DEFAULT_IRS = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


def family_label(spec: DistributionSpec) -> str:
    if spec.family == "student_t":
        return f"student_t{spec.tail_index:g}"
    if spec.family == "pareto":
        return f"pareto{spec.tail_index:g}"
    return spec.family


def _strictly_increasing(values) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass
class SweepConfig:
    families: tuple[DistributionSpec, ...] = DEFAULT_FAMILIES
    benefit: float = 1.0
    uncertainty_grid: tuple[float, ...] = DEFAULT_SIGMAS
    ir_grid: tuple[float, ...] = DEFAULT_IRS
    k: float = 10.0
    horizon: int = 1000

    def __post_init__(self):
        self.families = tuple(self.families)
        self.uncertainty_grid = tuple(float(s) for s in self.uncertainty_grid)
        self.ir_grid = tuple(float(r) for r in self.ir_grid)
        if not self.families:
            raise ConfigurationError("families must be non-empty")
        for spec in self.families:
            if not spec.is_location_scale:
                raise ConfigurationError(f"family {spec.family} is not location-scale")
        if not self.uncertainty_grid or not _strictly_increasing(self.uncertainty_grid):
            raise ConfigurationError("uncertainty_grid must be non-empty and strictly increasing")
        if any(s <= 0 for s in self.uncertainty_grid):
            raise ConfigurationError("uncertainty_grid values must be > 0")
        if not self.ir_grid or not _strictly_increasing(self.ir_grid):
            raise ConfigurationError("ir_grid must be non-empty and strictly increasing")
        if not self.k > 0:
            raise ConfigurationError(f"k must be > 0, got {self.k}")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.benefit < 0:
            raise ConfigurationError("benefit must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    family: str
    mu: float
    sigma: float
    ir: float
    k: float
    per_period_ruin: float
    horizon_ruin: float


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    horizon: int = 1000

    def by_family(self, family: str) -> list[SweepRow]:
        return [r for r in self.rows if r.family == family]


def horizon_ruin(per_period: float, horizon: int) -> float:
    if per_period >= 1.0:
        return 1.0
    return -math.expm1(horizon * math.log1p(-per_period))


def per_period_ruin(template: DistributionSpec, mu: float, sigma: float, k: float) -> float:
    """P(X <= -k) for the template family moved to location mu and scale sigma."""
    if k <= -mu:
        raise ConfigurationError(f"barrier K={k} must lie below the benefit: need K > -mu = {-mu}")
    spec = DistributionSpec(template.family, mu, sigma, template.tail_index, template.support_min, template.p)
    return float(cdf(spec, -k))


def _row(template, mu, sigma, k, horizon) -> SweepRow:
    p = per_period_ruin(template, mu, sigma, k)
    return SweepRow(family_label(template), mu, sigma, mu / sigma, k, p, horizon_ruin(p, horizon))


def scale_sweep(config: SweepConfig) -> SweepResult:
    """Mean-preserving spread: fixed benefit, scale over ``uncertainty_grid``."""
    rows = [
        _row(t, config.benefit, s, config.k, config.horizon)
        for t in config.families
        for s in config.uncertainty_grid
    ]
    return SweepResult(rows, config.horizon)


def information_ratio_sweep(config: SweepConfig, sigma: float = 1.0) -> SweepResult:
    """Benefit = IR * sigma at fixed scale, over ``ir_grid``; rows ordered by family then IR."""
    rows = [
        _row(t, ir * sigma, sigma, config.k, config.horizon)
        for t in config.families
        for ir in config.ir_grid
    ]
    return SweepResult(rows, config.horizon)


@dataclass(frozen=True)
class SkepticismEntry:
    family: str
    sigma_lo: float
    sigma_hi: float
    per_period_lo: float
    per_period_hi: float
    horizon_lo: float
    horizon_hi: float
    ratio: float  # horizon_hi / horizon_lo


def skepticism_report(config: SweepConfig) -> list[SkepticismEntry]:
    """Per family, how far ruin rises from the lowest to the highest scale."""
    if len(config.uncertainty_grid) < 2:
        raise ConfigurationError("skepticism_report needs at least two sigma values")
    lo, hi = config.uncertainty_grid[0], config.uncertainty_grid[-1]
    out = []
    for t in config.families:
        a = _row(t, config.benefit, lo, config.k, config.horizon)
        b = _row(t, config.benefit, hi, config.k, config.horizon)
        ratio = b.horizon_ruin / a.horizon_ruin if a.horizon_ruin > 0 else math.inf
        out.append(
            SkepticismEntry(
                a.family, lo, hi, a.per_period_ruin, b.per_period_ruin,
                a.horizon_ruin, b.horizon_ruin, ratio,
            )
        )
    return out


def skepticism_pair(template: DistributionSpec, mu: float, k: float, sigma_lo: float,
                    sigma_hi: float, horizon: int = 1000) -> SkepticismEntry:
    """Two-point version of :func:`skepticism_report`; allows sigma_hi == sigma_lo."""
    if sigma_hi < sigma_lo:
        raise ConfigurationError("sigma_hi must be >= sigma_lo")
    a = _row(template, mu, sigma_lo, k, horizon)
    b = _row(template, mu, sigma_hi, k, horizon)
    ratio = b.horizon_ruin / a.horizon_ruin if a.horizon_ruin > 0 else math.inf
    return SkepticismEntry(a.family, sigma_lo, sigma_hi, a.per_period_ruin, b.per_period_ruin,
                           a.horizon_ruin, b.horizon_ruin, ratio)
