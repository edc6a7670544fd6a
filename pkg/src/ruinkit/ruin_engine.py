"""Ruin probabilities: repeated exposures and absorbing-barrier walks.

Closed forms cover the repeated-exposure curve and the +/-1 gambler's ruin;
Monte Carlo covers arbitrary step laws. A simulated path is checked against
the barrier only at integer steps, and once absorbed it never moves again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, draw
from .errors import ParameterDomainError
from .rng import run_blocks

DEFAULT_HORIZON_CAP = 1_000_000


@dataclass(frozen=True)
class ExposurePolicy:
    p: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterDomainError(f"p must lie in [0, 1], got {self.p}")
        if int(self.n) != self.n or self.n < 0:
            raise ParameterDomainError(f"n must be a non-negative integer, got {self.n}")


@dataclass(frozen=True)
class WalkSpec:
    start: float
    step: DistributionSpec
    barrier: float = 0.0
    upper_barrier: float | None = None
    horizon: int | None = None  # None: run until absorption or the cap

    def __post_init__(self):
        if not self.start > self.barrier:
            raise ParameterDomainError("start wealth must lie strictly above the barrier")
        if self.upper_barrier is not None and not self.start < self.upper_barrier:
            raise ParameterDomainError("start wealth must lie strictly below the upper barrier")
        if self.horizon is not None and self.horizon < 1:
            raise ParameterDomainError("horizon must be >= 1")


@dataclass(frozen=True)
class HistogramBin:
    bin_lo: int
    bin_hi: int  # exclusive
    count: int


@dataclass
class RuinReport:
    ruin_probability: float
    ci95: tuple[float, float]
    time_to_ruin: list[HistogramBin]
    replicates: int
    seed: int
    ruined: int = 0
    absorbed_upper: int = 0
    survived_at_cap: int = 0
    horizon: int | None = None
    paths: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def histogram_mass(self) -> float:
        return sum(b.count for b in self.time_to_ruin) / self.replicates

    def to_dict(self) -> dict:
        return {
            "ruin_probability": self.ruin_probability,
            "ci95": list(self.ci95),
            "replicates": self.replicates,
            "seed": self.seed,
            "ruined": self.ruined,
            "absorbed_upper": self.absorbed_upper,
            "survived_at_cap": self.survived_at_cap,
            "horizon": self.horizon,
            "time_to_ruin": [
                {"bin_lo": b.bin_lo, "bin_hi": b.bin_hi, "count": b.count} for b in self.time_to_ruin
            ],
        }


def wilson_interval(count: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = count / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half)))


def log2_bin_counts(times: np.ndarray) -> np.ndarray:
    """Counts per bin [2^j, 2^(j+1)) for positive integer times."""
    times = np.asarray(times, dtype=np.int64)
    if times.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, exponent = np.frexp(times.astype(float))
    return np.bincount(exponent - 1)


def _histogram(counts: np.ndarray) -> list[HistogramBin]:
    return [HistogramBin(1 << j, 1 << (j + 1), int(c)) for j, c in enumerate(counts)]


def _add_counts(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(max(len(a), len(b)), dtype=np.int64)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


# -- closed forms --------------------------------------------------------------


def repeated_exposure_ruin(policy: ExposurePolicy) -> float:
    """1 - (1 - p)^n, evaluated in log space."""
    if policy.n == 0 or policy.p == 0.0:
        return 0.0
    if policy.p == 1.0:
        return 1.0
    return -math.expm1(policy.n * math.log1p(-policy.p))


def exposures_to_ruin_level(p: float, target: float) -> int:
    """Smallest n with 1 - (1 - p)^n >= target."""
    if not 0.0 < p < 1.0:
        raise ParameterDomainError(f"p must lie strictly inside (0, 1), got {p}")
    if not 0.0 < target < 1.0:
        raise ParameterDomainError(f"target must lie strictly inside (0, 1), got {target}")
    n = max(1, math.ceil(math.log1p(-target) / math.log1p(-p)))
    # guard the ceiling against rounding on either side
    while n > 1 and repeated_exposure_ruin(ExposurePolicy(p, n - 1)) >= target:
        n -= 1
    while repeated_exposure_ruin(ExposurePolicy(p, n)) < target:
        n += 1
    return n


def gambler_ruin_closed_form(a: int, upper: int | None, p_up: float) -> float:
    """Ruin probability of the +/-1 walk from ``a`` with barriers 0 and ``upper``."""
    if int(a) != a or a < 1:
        raise ParameterDomainError(f"start must be a positive integer, got {a}")
    if upper is not None and (int(upper) != upper or not a < upper):
        raise ParameterDomainError(f"need 0 < a < N, got a={a}, N={upper}")
    if not 0.0 <= p_up <= 1.0:
        raise ParameterDomainError(f"p_up must lie in [0, 1], got {p_up}")
    q = 1.0 - p_up
    if upper is None:
        if p_up <= 0.5:
            return 1.0
        return (q / p_up) ** a
    if p_up == 0.0:
        return 1.0
    if p_up == 1.0:
        return 0.0
    if p_up == 0.5:
        return 1.0 - a / upper
    r = q / p_up
    return (r**a - r**upper) / (1.0 - r**upper)


# -- simulation ----------------------------------------------------------------


def simulate_repeated_exposure(policy: ExposurePolicy, replicates: int, seed: int = 0) -> RuinReport:
    """Monte Carlo of n independent exposures; the first failing exposure is the ruin time.

    The index of the first failure is drawn directly (geometric law), so a
    replicate costs one draw regardless of n.
    """
    if replicates < 1:
        raise ParameterDomainError("replicates must be >= 1")

    def block(rng, size):
        if policy.p == 0.0 or policy.n == 0:
            return 0, np.zeros(0, dtype=np.int64)
        first = rng.geometric(policy.p, size)
        hit = first[first <= policy.n]
        return hit.size, log2_bin_counts(hit)

    ruined, counts = 0, np.zeros(0, dtype=np.int64)
    for c, h in run_blocks(block, replicates, seed, "repeated_exposure"):
        ruined += c
        counts = _add_counts(counts, h)
    return RuinReport(
        ruin_probability=ruined / replicates,
        ci95=wilson_interval(ruined, replicates),
        time_to_ruin=_histogram(counts),
        replicates=replicates,
        seed=seed,
        ruined=ruined,
        horizon=policy.n,
    )


def simulate_absorbing_walk(
    spec: WalkSpec,
    replicates: int,
    seed: int = 0,
    horizon_cap: int = DEFAULT_HORIZON_CAP,
    record_paths: bool = False,
    workers: int = 1,
) -> RuinReport:
    """Monte Carlo of W_{t+1} = W_t + X_t with absorption at the barrier(s).

    Ruin is the first integer step with W_t <= barrier. Reaching the upper
    barrier (W_t >= upper) also absorbs, as survival. Paths still alive at
    the horizon count as survivors and are reported in ``survived_at_cap``.
    ``record_paths`` keeps every path (frozen after absorption); only use it
    for small runs.
    """
    if replicates < 1:
        raise ParameterDomainError("replicates must be >= 1")
    horizon = spec.horizon if spec.horizon is not None else horizon_cap

    def block(rng, size):
        wealth = np.full(size, float(spec.start))
        alive = np.arange(size)
        ruin_time = np.zeros(size, dtype=np.int64)
        upper_hit = 0
        history = [wealth.copy()] if record_paths else None
        t = 0
        while alive.size and t < horizon:
            t += 1
            wealth[alive] += draw(spec.step, rng, alive.size)
            w = wealth[alive]
            down = w <= spec.barrier
            ruin_time[alive[down]] = t
            done = down
            if spec.upper_barrier is not None:
                up = (w >= spec.upper_barrier) & ~down
                upper_hit += int(np.count_nonzero(up))
                done = down | up
            alive = alive[~done]
            if record_paths:
                history.append(wealth.copy())
        times = ruin_time[ruin_time > 0]
        paths = np.stack(history, axis=1) if record_paths else None
        return times.size, upper_hit, alive.size, log2_bin_counts(times), paths

    ruined = upper = alive = 0
    counts = np.zeros(0, dtype=np.int64)
    paths: list[np.ndarray] | None = [] if record_paths else None
    for c, u, a, h, p in run_blocks(block, replicates, seed, "absorbing_walk", workers):
        ruined += c
        upper += u
        alive += a
        counts = _add_counts(counts, h)
        if record_paths:
            paths.extend(list(p))
    return RuinReport(
        ruin_probability=ruined / replicates,
        ci95=wilson_interval(ruined, replicates),
        time_to_ruin=_histogram(counts),
        replicates=replicates,
        seed=seed,
        ruined=ruined,
        absorbed_upper=upper,
        survived_at_cap=alive,
        horizon=horizon,
        paths=paths,
    )
