"""Comparing two random quantities correctly.

The statistics of X - Y are not the differences of the statistics of X and
Y: Var(X - Y) is not Var(X) - Var(Y), and neither is the coefficient of
variation. Likewise "one test significant, the other not" is not a test of
a difference between two effects.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from .distributions import SampleSeries
from .errors import ParameterDomainError
from .rng import run_blocks, substream


@dataclass(frozen=True)
class MomentBlock:
    mean: float
    variance: float
    cv: float | None  # mean / sd; None when sd == 0


@dataclass
class ComparisonReport:
    correct: MomentBlock
    naive: MomentBlock
    mode: str
    n: int
    flags: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _cv(mean: float, var: float) -> float | None:
    return mean / math.sqrt(var) if var > 0 else None


def _values(s) -> np.ndarray:
    return np.asarray(s.values if isinstance(s, SampleSeries) else s, dtype=float)


def difference_stats(x, y, mode: str = "paired", seed: int = 0) -> ComparisonReport:
    """Moments of X - Y next to the naive differences of moments.

    ``paired`` subtracts element-wise and needs equal lengths. ``independent``
    breaks any pairing: the longer sample is kept in order and the shorter one
    is resampled with replacement (or permuted, when the lengths match) to the
    same length, using ``seed``.
    """
    xv, yv = _values(x), _values(y)
    if len(xv) < 2 or len(yv) < 2:
        raise ParameterDomainError("both samples need at least 2 values")
    if mode == "paired":
        if len(xv) != len(yv):
            raise ParameterDomainError("paired mode needs equal lengths")
        d = xv - yv
    elif mode == "independent":
        rng = substream(seed, "difference_pairing")
        if len(xv) == len(yv):
            d = xv - rng.permutation(yv)
        elif len(xv) > len(yv):
            d = xv - rng.choice(yv, size=len(xv), replace=True)
        else:
            d = rng.choice(xv, size=len(yv), replace=True) - yv
    else:
        raise ParameterDomainError(f"unknown mode {mode!r}")

    d_mean, d_var = float(d.mean()), float(d.var(ddof=1))
    correct = MomentBlock(d_mean, d_var, _cv(d_mean, d_var))

    mx, my = float(xv.mean()), float(yv.mean())
    vx, vy = float(xv.var(ddof=1)), float(yv.var(ddof=1))
    cx, cy = _cv(mx, vx), _cv(my, vy)
    naive = MomentBlock(mx - my, vx - vy, None if cx is None or cy is None else cx - cy)

    def differs(a, b, tol=0.1):
        if a is None or b is None:
            return a is not b
        return abs(a - b) > tol * max(abs(a), abs(b), 1e-12)

    flags = {
        "cv_undefined": correct.cv is None,
        "naive_variance_negative": naive.variance < 0,
        "variance_discrepancy": differs(correct.variance, naive.variance),
        "cv_discrepancy": differs(correct.cv, naive.cv),
    }
    return ComparisonReport(correct, naive, mode, len(d), flags)


# -- the two-separate-tests error ------------------------------------------------


def _z_crit(alpha: float) -> float:
    return float(-special.ndtri(alpha / 2))


def z_test_power(effect: float, n_per_group: int, alpha: float = 0.05) -> float:
    """Power of the two-sided two-sample z-test with unit-variance groups."""
    shift = effect * math.sqrt(n_per_group / 2.0)
    z = _z_crit(alpha)
    return float(special.ndtr(shift - z) + special.ndtr(-shift - z))


def effect_for_power(power: float, n_per_group: int, alpha: float = 0.05) -> float:
    """Effect size giving ``power`` (one-sided approximation, exact at 0.5 up to the far tail)."""
    return (_z_crit(alpha) + float(special.ndtri(power))) / math.sqrt(n_per_group / 2.0)


@dataclass(frozen=True)
class TwoTestReport:
    effect_x: float
    effect_y: float
    n_per_group: int
    alpha: float
    replicates: int
    seed: int
    incorrect_rate: float
    correct_rate: float
    significant_x_rate: float
    significant_y_rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def two_test_fallacy_sim(
    effect_x: float,
    effect_y: float,
    n_per_group: int,
    alpha: float = 0.05,
    replicates: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> TwoTestReport:
    """Claim rates of the two-separate-tests procedure and of the interaction test.

    Each replicate runs two experiments (X and Y), each comparing a treated
    and a control group of ``n_per_group`` unit-variance gaussian draws.
    Group means are drawn from their exact N(mu, 1/n) law. The incorrect
    procedure claims the effects differ when exactly one experiment is
    significant; the correct one z-tests the difference of the two effects.
    """
    if n_per_group < 2:
        raise ParameterDomainError("n_per_group must be >= 2")
    if not 0 < alpha < 1:
        raise ParameterDomainError("alpha must lie in (0, 1)")
    if replicates < 1:
        raise ParameterDomainError("replicates must be >= 1")
    zc = _z_crit(alpha)
    se_group = 1.0 / math.sqrt(n_per_group)

    def block(rng, size):
        means = rng.standard_normal((size, 4)) * se_group
        means[:, 0] += effect_x  # treated X
        means[:, 2] += effect_y  # treated Y
        dx = means[:, 0] - means[:, 1]
        dy = means[:, 2] - means[:, 3]
        sig_x = np.abs(dx) / (se_group * math.sqrt(2)) > zc
        sig_y = np.abs(dy) / (se_group * math.sqrt(2)) > zc
        inter = np.abs(dx - dy) / (2 * se_group) > zc
        return np.array(
            [np.count_nonzero(sig_x ^ sig_y), np.count_nonzero(inter),
             np.count_nonzero(sig_x), np.count_nonzero(sig_y)]
        )

    c = np.sum(run_blocks(block, replicates, seed, "two_test", workers), axis=0)
    r = replicates
    return TwoTestReport(
        effect_x, effect_y, n_per_group, alpha, replicates, seed,
        incorrect_rate=c[0] / r, correct_rate=c[1] / r,
        significant_x_rate=c[2] / r, significant_y_rate=c[3] / r,
    )


# -- luck quadrants -------------------------------------------------------------

QUADRANTS = ("lucky-lucky", "lucky-unlucky", "unlucky-lucky", "unlucky-unlucky")


@dataclass(frozen=True)
class LuckReport:
    p_luck: float
    replicates: int
    seed: int
    frequencies: dict[str, float]
    mean_gap: dict[str, float | None]

    def to_dict(self) -> dict:
        return asdict(self)


def luck_quadrant_sim(
    p_luck: float,
    replicates: int = 100_000,
    seed: int = 0,
    luck_effect: float = 1.0,
    noise_sd: float = 1.0,
) -> LuckReport:
    """Two people, each independently lucky with probability ``p_luck``.

    A person's outcome is +luck_effect (lucky) or -luck_effect (unlucky) plus
    gaussian noise. Reports how often each pair of fortunes occurs and the
    mean absolute outcome gap within each pair type.
    """
    if not 0 <= p_luck <= 1:
        raise ParameterDomainError("p_luck must lie in [0, 1]")
    if replicates < 1:
        raise ParameterDomainError("replicates must be >= 1")

    def block(rng, size):
        lucky = rng.random((size, 2)) < p_luck
        outcome = np.where(lucky, luck_effect, -luck_effect) + noise_sd * rng.standard_normal((size, 2))
        gap = np.abs(outcome[:, 0] - outcome[:, 1])
        code = 2 * (~lucky[:, 0]) + (~lucky[:, 1])  # index into QUADRANTS
        counts = np.bincount(code, minlength=4)
        gaps = np.bincount(code, weights=gap, minlength=4)
        return counts, gaps

    parts = run_blocks(block, replicates, seed, "luck")
    counts = np.sum([p[0] for p in parts], axis=0)
    gaps = np.sum([p[1] for p in parts], axis=0)
    freqs = {q: float(counts[i] / replicates) for i, q in enumerate(QUADRANTS)}
    mean_gap = {q: (float(gaps[i] / counts[i]) if counts[i] else None) for i, q in enumerate(QUADRANTS)}
    return LuckReport(p_luck, replicates, seed, freqs, mean_gap)
