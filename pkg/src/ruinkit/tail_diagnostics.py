"""Thin- vs fat-tail diagnostics.

Implements the subexponential tests (sum of two copies against one copy, sum
against maximum), the max-to-sum moment probe, the Hill tail-index
estimator, an exponential-moment probe, and the four-quadrant verdict.

Two-tailed inputs are folded by absolute value before any positive-support
diagnostic runs, so the same code covers extreme losses and extreme gains.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .distributions import DistributionSpec, SampleSeries, draw, survival
from .errors import (
    AmbiguousClassificationError,
    DegenerateInputError,
    InsufficientTailDataError,
    ParameterDomainError,
)
from .rng import concat, run_blocks

MIN_EXCEEDANCES = 100
SUBEXP_BAND = (1.5, 3.0)
DEFAULT_EPSILONS = (0.5, 1.0, 2.0)
HILL_EXPONENT = 0.6
STABILITY_TOL = 0.10

TAIL_CLASSES = ("thin", "subexponential", "infinite_variance", "infinite_mean")
FAT_CLASSES = ("subexponential", "infinite_variance", "infinite_mean", "fat")


@dataclass(frozen=True)
class RatioPoint:
    x: float
    ratio: float
    stderr: float
    exceedances: int


@dataclass(frozen=True)
class SumMaxPoint:
    n: int
    x: float
    ratio_a: float
    ratio_b: float
    stderr_a: float
    stderr_b: float
    sum_exceedances: int
    max_exceedances: int


@dataclass(frozen=True)
class MomentVerdict:
    epsilon: float
    verdict: str  # "stable" or "divergent"
    value: float  # final running mean of exp(eps * X); inf on overflow


@dataclass
class TailDiagnosticsReport:
    convolution_ratios: list[RatioPoint] = field(default_factory=list)
    sum_max_ratios: list[SumMaxPoint] = field(default_factory=list)
    max_to_sum_path: list[tuple[int, float]] = field(default_factory=list)
    moment_order: float = 1.0
    exp_moment_probe: list[MomentVerdict] = field(default_factory=list)
    hill_alpha: float | None = None
    hill_stderr: float | None = None
    hill_k: int | None = None
    tail_class: str | None = None
    subexp_band: tuple[float, float] = SUBEXP_BAND
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_to_sum_path"] = [list(p) for p in self.max_to_sum_path]
        out["subexp_band"] = list(self.subexp_band)
        return out


@dataclass(frozen=True)
class QuadrantVerdict:
    quadrant: str
    tail_class: str
    scope: str
    pp_applies: bool


def _positive_values(data) -> np.ndarray:
    values = data.values if isinstance(data, SampleSeries) else data
    return np.abs(np.asarray(values, dtype=float))


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else math.inf


# -- convolution ratio ---------------------------------------------------------


def convolution_ratio(
    source: DistributionSpec | SampleSeries | np.ndarray,
    xs: Iterable[float],
    replicates: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> list[RatioPoint]:
    """Estimate P(X1 + X2 > x) / P(X > x) at each x.

    For a distribution the numerator is Monte Carlo over ``replicates`` pairs
    and the denominator is the exact survival; two-tailed laws are not
    folded here, so a gaussian gives the unfolded ratio. For a sample, consecutive
    values are paired for the numerator and all values feed the empirical
    denominator; ``replicates`` and ``seed`` are ignored.
    """
    xs = [float(x) for x in xs]
    if isinstance(source, DistributionSpec):
        if replicates < 1:
            raise ParameterDomainError("replicates must be >= 1")
        grid = np.asarray(xs)

        def block(rng, size):
            s = draw(source, rng, (size, 2)).sum(axis=1)
            return np.count_nonzero(s[:, None] > grid[None, :], axis=0)

        counts = np.sum(run_blocks(block, replicates, seed, "convolution", workers), axis=0)
        out = []
        for x, c in zip(xs, counts):
            c = int(c)
            if c < MIN_EXCEEDANCES:
                raise InsufficientTailDataError(x, c, MIN_EXCEEDANCES)
            p = c / replicates
            sf = float(survival(source, x))
            se = math.sqrt(p * (1 - p) / replicates)
            out.append(RatioPoint(x, p / sf, se / sf, c))
        return out

    values = _positive_values(source)
    pairs = values[: 2 * (len(values) // 2)].reshape(-1, 2).sum(axis=1)
    out = []
    for x in xs:
        c_sum = int(np.count_nonzero(pairs > x))
        c_one = int(np.count_nonzero(values > x))
        if min(c_sum, c_one) < MIN_EXCEEDANCES:
            raise InsufficientTailDataError(x, min(c_sum, c_one), MIN_EXCEEDANCES)
        p_sum = c_sum / len(pairs)
        p_one = c_one / len(values)
        ratio = p_sum / p_one
        # delta method on two (nearly independent) binomial proportions
        rel = math.sqrt((1 - p_sum) / c_sum + (1 - p_one) / c_one)
        out.append(RatioPoint(x, ratio, ratio * rel, c_sum))
    return out


def deepest_feasible_x(values: np.ndarray, start_q: float = 0.9) -> list[float]:
    """Upper-tail evaluation grid for a sample: quantiles above ``start_q`` that
    keep at least MIN_EXCEEDANCES pair sums beyond them."""
    values = np.abs(np.asarray(values, dtype=float))
    pairs = values[: 2 * (len(values) // 2)].reshape(-1, 2).sum(axis=1)
    if len(pairs) < MIN_EXCEEDANCES or len(values) < 10 * MIN_EXCEEDANCES:
        return []
    # deepest level: the MIN_EXCEEDANCES-th largest pair sum, also capped so
    # that single values keep enough exceedances
    cap_pair = np.partition(pairs, len(pairs) - MIN_EXCEEDANCES)[len(pairs) - MIN_EXCEEDANCES]
    cap_one = np.partition(values, len(values) - MIN_EXCEEDANCES)[len(values) - MIN_EXCEEDANCES]
    top = min(cap_pair, cap_one)
    lo = float(np.quantile(values, start_q))
    if not top > lo:
        return []
    # strict inequality in the estimator: step just below the cap
    grid = np.geomspace(max(lo, 1e-300), top, 8) if lo > 0 else np.linspace(lo, top, 8)
    grid[-1] = np.nextafter(top, -np.inf)
    return [float(x) for x in grid]


# -- sum vs max ----------------------------------------------------------------


def sum_max_ratio(
    spec: DistributionSpec,
    n: int,
    xs: Iterable[float],
    replicates: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
) -> list[SumMaxPoint]:
    """Estimate P(S_n > x) / P(X > x) and P(S_n > x) / P(M_n > x).

    ``ratio_a`` divides by the exact single-copy survival; ``ratio_b`` counts
    sums and maxima on the same replicates, so for n=1 it is exactly 1.
    At least MIN_EXCEEDANCES sums must exceed each x. When no maximum
    exceeds x, ``ratio_b`` is reported as ``inf``.
    """
    if n < 1:
        raise ParameterDomainError("n must be >= 1")
    xs = [float(x) for x in xs]
    grid = np.asarray(xs)

    def block(rng, size):
        draws = draw(spec, rng, (size, n))
        s = draws.sum(axis=1)
        m = draws.max(axis=1)
        return np.stack(
            [
                np.count_nonzero(s[:, None] > grid[None, :], axis=0),
                np.count_nonzero(m[:, None] > grid[None, :], axis=0),
            ]
        )

    counts = np.sum(run_blocks(block, replicates, seed, "sum_max", workers), axis=0)
    out = []
    for j, x in enumerate(xs):
        c_s, c_m = int(counts[0, j]), int(counts[1, j])
        if c_s < MIN_EXCEEDANCES:
            raise InsufficientTailDataError(x, c_s, MIN_EXCEEDANCES)
        p_s = c_s / replicates
        sf = float(survival(spec, x))
        ratio_a = p_s / sf
        se_a = math.sqrt(p_s * (1 - p_s) / replicates) / sf
        ratio_b = _ratio(c_s, c_m)
        # {M_n > x} is contained in {S_n > x}: ratio_b - 1 = extra / c_m
        if c_m > 0:
            extra = c_s - c_m
            se_b = math.sqrt(extra / c_m**2 + extra**2 / c_m**3)
        else:
            se_b = math.inf
        out.append(SumMaxPoint(n, x, ratio_a, ratio_b, se_a, se_b, c_s, c_m))
    return out


def sum_quantile_mc(
    spec: DistributionSpec, n: int, q: float, replicates: int, seed: int = 0, workers: int = 1
) -> float:
    """Empirical q-quantile of S_n from an independent pilot run."""

    def block(rng, size):
        return draw(spec, rng, (size, n)).sum(axis=1)

    sums = concat(run_blocks(block, replicates, seed, "sum_quantile", workers))
    return float(np.quantile(sums, q))


# -- max-to-sum ----------------------------------------------------------------


def doubling_checkpoints(length: int) -> list[int]:
    pts = []
    k = 1
    while k < length:
        pts.append(k)
        k *= 2
    if length >= 1:
        pts.append(length)
    return pts


def max_to_sum(
    sample: SampleSeries | np.ndarray, p: float = 1.0, ns: Sequence[int] | None = None
) -> list[tuple[int, float]]:
    """Path of R_n(p) = max |X_i|^p / sum |X_i|^p over prefixes of the sample.

    ``ns`` selects the prefix lengths; by default powers of two plus the
    full length. Pass ``range(1, len+1)`` for every prefix.
    """
    values = _positive_values(sample)
    if len(values) < 1:
        raise DegenerateInputError("max_to_sum needs a non-empty sample")
    if not np.any(values > 0):
        raise DegenerateInputError("max_to_sum is undefined for an all-zero sample")
    if p <= 0:
        raise ParameterDomainError("moment order p must be > 0")
    powered = values**p
    cummax = np.maximum.accumulate(powered)
    cumsum = np.cumsum(powered)
    ns = doubling_checkpoints(len(values)) if ns is None else list(ns)
    out = []
    for n in ns:
        if not 1 <= n <= len(values):
            raise ParameterDomainError(f"prefix length {n} out of range")
        s = cumsum[n - 1]
        # an all-zero prefix has no defined ratio yet; skip it
        if s > 0:
            out.append((int(n), float(cummax[n - 1] / s)))
    return out


# -- Hill ----------------------------------------------------------------------


def default_hill_k(n: int) -> int:
    # nudge so exact powers (n=1e5 -> 1000) survive float rounding
    return int(math.floor(n**HILL_EXPONENT * (1 + 1e-12)))


def hill_estimator(sample: SampleSeries | np.ndarray, k: int | None = None) -> tuple[float, float]:
    """Hill estimate of the tail index from the k largest order statistics.

    Returns ``(alpha_hat, alpha_hat / sqrt(k))``.
    """
    values = _positive_values(sample)
    values = values[values > 0]
    if k is None:
        k = default_hill_k(len(values))
    if k < 10:
        raise ParameterDomainError(f"Hill estimator needs k >= 10, got {k}")
    if len(values) < k + 1:
        raise DegenerateInputError(f"Hill estimator needs {k + 1} positive values, got {len(values)}")
    top = np.partition(values, len(values) - k - 1)[len(values) - k - 1 :]
    threshold = top.min()
    top = np.sort(top)[1:]
    log_sum = float(np.sum(np.log(top / threshold)))
    if log_sum <= 0:
        raise DegenerateInputError("tied upper order statistics: Hill log-sum is zero")
    alpha = k / log_sum
    return alpha, alpha / math.sqrt(k)


# -- exponential moments -------------------------------------------------------


def exp_moment_probe(
    sample: SampleSeries | np.ndarray, epsilons: Iterable[float] = DEFAULT_EPSILONS
) -> list[MomentVerdict]:
    """Cauchy-stability check on running means of exp(eps * X).

    The running mean at n and at n/2 (the last two doubling windows) must
    agree within 10%; otherwise the moment is flagged divergent. Overflow of
    exp(eps * X) is flagged divergent outright.
    """
    values = _positive_values(sample)
    if len(values) < 2:
        raise DegenerateInputError("exp_moment_probe needs at least 2 values")
    half = len(values) // 2
    out = []
    for eps in epsilons:
        if not eps > 0:
            raise ParameterDomainError("epsilon must be > 0")
        with np.errstate(over="ignore"):
            terms = np.exp(eps * values)
            head = float(np.sum(terms[:half])) / half
            full = float(np.sum(terms)) / len(values)
        if not (math.isfinite(head) and math.isfinite(full)):
            out.append(MomentVerdict(float(eps), "divergent", math.inf))
            continue
        change = abs(full - head) / head
        verdict = "divergent" if change > STABILITY_TOL else "stable"
        out.append(MomentVerdict(float(eps), verdict, full))
    return out


# -- classification ------------------------------------------------------------


def classify_tail(
    hill_alpha: float | None,
    max_to_sum_final: float | None,
    convolution_deepest: float | None = None,
    exp_verdicts: Sequence[MomentVerdict] | None = None,
    band: tuple[float, float] = SUBEXP_BAND,
) -> str:
    """Assign a tail class from the diagnostics.

    Hill thresholds decide infinite mean (alpha <= 1) and infinite variance
    (alpha <= 2). Otherwise the law is subexponential if the deepest
    convolution ratio lies in ``band`` or every exponential moment diverges,
    and thin if not. Contradictions raise AmbiguousClassificationError:

    * alpha <= 2 while every light-tail probe is present and says thin;
    * alpha <= 1 while the max-to-sum ratio has already fallen below 0.01.
    """
    if hill_alpha is None or max_to_sum_final is None:
        raise ParameterDomainError("classify_tail needs the Hill and max-to-sum diagnostics")

    in_band = convolution_deepest is not None and band[0] <= convolution_deepest <= band[1]
    all_divergent = bool(exp_verdicts) and all(v.verdict == "divergent" for v in exp_verdicts)
    probe_label = "subexponential" if (in_band or all_divergent) else "thin"
    probes_all_thin = (
        convolution_deepest is not None
        and convolution_deepest > band[1]
        and bool(exp_verdicts)
        and all(v.verdict == "stable" for v in exp_verdicts)
    )

    if hill_alpha <= 1.0:
        if max_to_sum_final < 0.01:
            raise AmbiguousClassificationError(
                ("infinite_mean", probe_label),
                f"hill alpha {hill_alpha:.3g} but max-to-sum {max_to_sum_final:.3g}",
            )
        label = "infinite_mean"
    elif hill_alpha <= 2.0:
        label = "infinite_variance"
    else:
        return probe_label
    if probes_all_thin:
        raise AmbiguousClassificationError(
            (label, "thin"), f"hill alpha {hill_alpha:.3g} but all light-tail probes stable"
        )
    return label


def tail_report(
    sample: SampleSeries | np.ndarray,
    k: int | None = None,
    p: float = 1.0,
    epsilons: Iterable[float] = DEFAULT_EPSILONS,
    classify: bool = True,
) -> TailDiagnosticsReport:
    """Run every sample-based diagnostic and classify the tail."""
    values = _positive_values(sample)
    report = TailDiagnosticsReport(moment_order=p)
    report.max_to_sum_path = max_to_sum(values, p)
    alpha, se = hill_estimator(values, k)
    report.hill_alpha, report.hill_stderr = alpha, se
    report.hill_k = k if k is not None else default_hill_k(int(np.count_nonzero(values > 0)))
    report.exp_moment_probe = exp_moment_probe(values, epsilons)
    xs = deepest_feasible_x(values)
    if xs:
        report.convolution_ratios = convolution_ratio(values, xs)
    else:
        report.notes.append("convolution ratio skipped: too few tail exceedances")
    if classify:
        deepest = report.convolution_ratios[-1].ratio if report.convolution_ratios else None
        report.tail_class = classify_tail(
            alpha, report.max_to_sum_path[-1][1], deepest, report.exp_moment_probe
        )
    return report


def classify_quadrant(tail_class: str, scope: str) -> QuadrantVerdict:
    """Four-quadrant verdict: precaution applies only to fat tails with systemic exposure."""
    if tail_class not in TAIL_CLASSES + ("fat",):
        raise ParameterDomainError(f"unknown tail class {tail_class!r}")
    if scope not in ("local", "systemic"):
        raise ParameterDomainError(f"scope must be 'local' or 'systemic', got {scope!r}")
    fat = tail_class in FAT_CLASSES
    quadrant = {(False, "local"): "I", (False, "systemic"): "II", (True, "local"): "III",
                (True, "systemic"): "IV"}[(fat, scope)]
    return QuadrantVerdict(quadrant, tail_class, scope, quadrant == "IV")
