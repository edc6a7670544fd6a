"""Univariate laws contrasted in thin- vs fat-tailed risk analysis.

Each family is described by a :class:`DistributionSpec`. Evaluation functions
(:func:`survival`, :func:`cdf`, :func:`pdf`, :func:`quantile`) accept a
scalar or an array and use closed forms whenever one exists, written so that
deep tails keep full relative precision (``survival(gaussian, 11)`` is
``Phi(-11)`` to machine precision, not ``1 - 1``).

Parameter conventions
---------------------
gaussian      loc + scale * Z
exponential   loc + scale * E, E ~ Exp(1)  (rate = 1/scale)
bernoulli     loc + scale * B, B ~ Bernoulli(p); loc=-1, scale=2 gives +/-1 steps
lognormal     exp(loc + scale * Z)
pareto        survival (xmin/x)**alpha for x >= xmin; loc and scale unused
student_t     loc + scale * T_alpha, alpha = degrees of freedom
cauchy        loc + scale * C; identical to student_t with alpha=1 and the
              same loc/scale (no factor between the two scale conventions)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special

from .errors import ParameterDomainError
from .rng import concat, run_blocks, substream

FAMILIES = (
    "gaussian",
    "exponential",
    "bernoulli",
    "lognormal",
    "pareto",
    "student_t",
    "cauchy",
)
LOCATION_SCALE = ("gaussian", "exponential", "bernoulli", "student_t", "cauchy")
SYMMETRIC = ("gaussian", "student_t", "cauchy")
POSITIVE_SUPPORT = ("exponential", "lognormal", "pareto")

BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class DistributionSpec:
    """A named family plus its parameters."""

    family: str
    location: float = 0.0
    scale: float = 1.0
    tail_index: float | None = None
    support_min: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterDomainError(f"unknown family {self.family!r}")
        if not (math.isfinite(self.location) and math.isfinite(self.scale)):
            raise ParameterDomainError("location and scale must be finite")
        if not self.scale > 0:
            raise ParameterDomainError(f"scale must be > 0, got {self.scale}")
        if self.family in ("pareto", "student_t"):
            if self.tail_index is None or not self.tail_index > 0:
                raise ParameterDomainError(
                    f"{self.family} needs tail_index > 0, got {self.tail_index}"
                )
        elif self.tail_index is not None and not self.tail_index > 0:
            raise ParameterDomainError("tail_index must be > 0")
        if self.family == "pareto":
            if self.support_min is None:
                object.__setattr__(self, "support_min", 1.0)
            elif not self.support_min > 0:
                raise ParameterDomainError("pareto support_min must be > 0")
        if self.family == "bernoulli":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ParameterDomainError(f"bernoulli needs p in [0, 1], got {self.p}")

    # Convenience constructors -------------------------------------------------

    @classmethod
    def gaussian(cls, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("gaussian", loc, scale)

    @classmethod
    def exponential(cls, rate: float = 1.0, loc: float = 0.0) -> "DistributionSpec":
        return cls("exponential", loc, 1.0 / rate)

    @classmethod
    def bernoulli(cls, p: float, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("bernoulli", loc, scale, p=p)

    @classmethod
    def plus_minus_one(cls, p_up: float) -> "DistributionSpec":
        """Step of +1 with probability ``p_up``, else -1."""
        return cls("bernoulli", -1.0, 2.0, p=p_up)

    @classmethod
    def lognormal(cls, mu: float = 0.0, sigma: float = 1.0) -> "DistributionSpec":
        return cls("lognormal", mu, sigma)

    @classmethod
    def pareto(cls, alpha: float, xmin: float = 1.0) -> "DistributionSpec":
        return cls("pareto", tail_index=alpha, support_min=xmin)

    @classmethod
    def student_t(cls, alpha: float, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("student_t", loc, scale, tail_index=alpha)

    @classmethod
    def cauchy(cls, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("cauchy", loc, scale)

    # ---------------------------------------------------------------------------

    @property
    def is_location_scale(self) -> bool:
        return self.family in LOCATION_SCALE

    @property
    def positive_support(self) -> bool:
        return self.family in POSITIVE_SUPPORT or (
            self.family == "bernoulli" and self.location >= 0
        )

    @property
    def power_tail(self) -> float | None:
        """Exponent of a power-law tail, or None for laws with all moments finite."""
        if self.family in ("pareto", "student_t"):
            return self.tail_index
        if self.family == "cauchy":
            return 1.0
        return None

    def with_scale(self, scale: float) -> "DistributionSpec":
        return DistributionSpec(
            self.family, self.location, scale, self.tail_index, self.support_min, self.p
        )

    def with_location(self, location: float) -> "DistributionSpec":
        return DistributionSpec(
            self.family, location, self.scale, self.tail_index, self.support_min, self.p
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family, "loc": self.location, "scale": self.scale}
        if self.tail_index is not None:
            out["alpha"] = self.tail_index
        if self.support_min is not None:
            out["xmin"] = self.support_min
        if self.p is not None:
            out["p"] = self.p
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DistributionSpec":
        allowed = {"family", "loc", "scale", "alpha", "xmin", "p"}
        unknown = set(data) - allowed
        if unknown:
            raise ParameterDomainError(f"unknown distribution key(s): {sorted(unknown)}")
        if "family" not in data:
            raise ParameterDomainError("distribution spec needs a 'family'")

        def num(key):
            value = data.get(key)
            return None if value is None else float(value)

        return cls(
            family=data["family"],
            location=float(data.get("loc", 0.0)),
            scale=float(data.get("scale", 1.0)),
            tail_index=num("alpha"),
            support_min=num("xmin"),
            p=num("p"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DistributionSpec":
        return cls.from_dict(json.loads(text))


@dataclass
class SampleSeries:
    values: np.ndarray
    seed: int | None = None
    spec: DistributionSpec | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)


def _scalar_or_array(value):
    arr = np.asarray(value, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def _standardize(spec: DistributionSpec, x):
    return (np.asarray(x, dtype=float) - spec.location) / spec.scale


# Standard (loc 0, scale 1) upper-tail functions, accurate in the far tail.

def _gauss_sf(z):
    return 0.5 * special.erfc(z / math.sqrt(2.0))


def _cauchy_sf(z):
    return np.arctan2(1.0, z) / math.pi


def _t2_sf(z):
    z = np.asarray(z, dtype=float)
    r = np.hypot(z, math.sqrt(2.0))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        upper = 1.0 / (r * (r + np.abs(z)))
    upper = np.where(np.isinf(z), 0.0, upper)
    return np.where(z >= 0, upper, 1.0 - upper)


def _t_sf(df: float, z):
    if df == 1.0:
        return _cauchy_sf(z)
    if df == 2.0:
        return _t2_sf(z)
    return special.stdtr(df, -np.asarray(z, dtype=float))


def survival(spec: DistributionSpec, x):
    """P(X > x)."""
    f = spec.family
    if f == "gaussian":
        out = _gauss_sf(_standardize(spec, x))
    elif f == "cauchy":
        out = _cauchy_sf(_standardize(spec, x))
    elif f == "student_t":
        out = _t_sf(spec.tail_index, _standardize(spec, x))
    elif f == "exponential":
        z = _standardize(spec, x)
        out = np.where(z <= 0, 1.0, np.exp(-np.maximum(z, 0.0)))
    elif f == "pareto":
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            ratio = spec.support_min / np.maximum(x, spec.support_min)
        out = np.where(x <= spec.support_min, 1.0, ratio**spec.tail_index)
    elif f == "lognormal":
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.maximum(x, 0.0)) - spec.location) / spec.scale
        out = np.where(x <= 0, 1.0, _gauss_sf(z))
    else:  # bernoulli
        x = np.asarray(x, dtype=float)
        hi = spec.location + spec.scale
        out = np.where(x < spec.location, 1.0, np.where(x < hi, spec.p, 0.0))
    return _scalar_or_array(out)


def cdf(spec: DistributionSpec, x):
    """P(X <= x), computed without cancellation in the lower tail."""
    f = spec.family
    if f in SYMMETRIC:
        # F(x) = S(2 loc - x) for laws symmetric about loc
        return survival(spec, 2.0 * spec.location - np.asarray(x, dtype=float))
    if f == "lognormal":
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.maximum(x, 0.0)) - spec.location) / spec.scale
        return _scalar_or_array(np.where(x <= 0, 0.0, _gauss_sf(-z)))
    if f == "exponential":
        z = _standardize(spec, x)
        return _scalar_or_array(np.where(z <= 0, 0.0, -np.expm1(-np.maximum(z, 0.0))))
    return _scalar_or_array(1.0 - np.asarray(survival(spec, x)))


def pdf(spec: DistributionSpec, x):
    """Density; bernoulli has none and raises."""
    f = spec.family
    x = np.asarray(x, dtype=float)
    if f == "bernoulli":
        raise ParameterDomainError("bernoulli has no density")
    if f == "pareto":
        a, m = spec.tail_index, spec.support_min
        with np.errstate(divide="ignore"):
            out = np.where(x < m, 0.0, a * m**a / np.maximum(x, m) ** (a + 1))
        return _scalar_or_array(out)
    if f == "lognormal":
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.maximum(x, 1e-300))
            dens = np.exp(-0.5 * ((lx - spec.location) / spec.scale) ** 2) / (
                np.maximum(x, 1e-300) * spec.scale * math.sqrt(2 * math.pi)
            )
        return _scalar_or_array(np.where(x <= 0, 0.0, dens))
    z = _standardize(spec, x)
    if f == "gaussian":
        dens = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    elif f == "exponential":
        dens = np.where(z < 0, 0.0, np.exp(-np.maximum(z, 0.0)))
    elif f == "cauchy":
        dens = 1.0 / (math.pi * (1.0 + z * z))
    else:
        v = spec.tail_index
        logc = special.gammaln((v + 1) / 2) - special.gammaln(v / 2) - 0.5 * math.log(v * math.pi)
        dens = np.exp(logc - (v + 1) / 2 * np.log1p(z * z / v))
    return _scalar_or_array(dens / spec.scale)


def _bisect_quantile(spec: DistributionSpec, q: float) -> float:
    lo, hi = spec.location - spec.scale, spec.location + spec.scale
    while cdf(spec, lo) > q:
        lo = spec.location - 2.0 * (spec.location - lo)
    while cdf(spec, hi) < q:
        hi = spec.location + 2.0 * (hi - spec.location)
    while hi - lo > BISECTION_TOL * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if cdf(spec, mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def quantile(spec: DistributionSpec, q: float) -> float:
    """Smallest x with F(x) >= q, for 0 < q < 1."""
    if not 0.0 < q < 1.0:
        raise ParameterDomainError(f"quantile level must lie in (0, 1), got {q}")
    f, loc, sc = spec.family, spec.location, spec.scale
    if f == "gaussian":
        return loc + sc * float(special.ndtri(q))
    if f == "lognormal":
        return math.exp(loc + sc * float(special.ndtri(q)))
    if f == "exponential":
        return loc - sc * math.log1p(-q)
    if f == "pareto":
        return spec.support_min * (1.0 - q) ** (-1.0 / spec.tail_index)
    if f == "cauchy" or (f == "student_t" and spec.tail_index == 1.0):
        return loc + sc * math.tan(math.pi * (q - 0.5))
    if f == "student_t" and spec.tail_index == 2.0:
        return loc + sc * (2.0 * q - 1.0) / math.sqrt(2.0 * q * (1.0 - q))
    if f == "bernoulli":
        return loc if q <= 1.0 - spec.p else loc + sc
    return _bisect_quantile(spec, q)


def draw(spec: DistributionSpec, rng: np.random.Generator, size) -> np.ndarray:
    """Raw draws from ``rng``; prefer :func:`sample` for seeded series."""
    f, loc, sc = spec.family, spec.location, spec.scale
    if f == "gaussian":
        return loc + sc * rng.standard_normal(size)
    if f == "exponential":
        return loc + sc * rng.standard_exponential(size)
    if f == "bernoulli":
        return loc + sc * (rng.random(size) < spec.p)
    if f == "lognormal":
        return np.exp(loc + sc * rng.standard_normal(size))
    if f == "pareto":
        # 1 - U lies in (0, 1]
        return spec.support_min * (1.0 - rng.random(size)) ** (-1.0 / spec.tail_index)
    if f == "cauchy":
        return loc + sc * rng.standard_cauchy(size)
    return loc + sc * rng.standard_t(spec.tail_index, size)


def sample(spec: DistributionSpec, n: int, seed: int = 0) -> SampleSeries:
    if n < 0:
        raise ParameterDomainError("sample size must be >= 0")
    rng = substream(seed, "sample")
    return SampleSeries(draw(spec, rng, n), seed=seed, spec=spec)


@dataclass(frozen=True)
class TailEstimate:
    probability: float
    stderr: float
    count: int
    replicates: int


def binomial_estimate(count: int, replicates: int) -> TailEstimate:
    p = count / replicates
    return TailEstimate(p, math.sqrt(p * (1.0 - p) / replicates), count, replicates)


def sum_survival_mc(
    spec: DistributionSpec, k: int, x: float, replicates: int, seed: int = 0, workers: int = 1
) -> TailEstimate:
    """Monte Carlo estimate of P(X_1 + ... + X_k > x) with its binomial standard error."""
    if k < 1 or replicates < 1:
        raise ParameterDomainError("need k >= 1 and replicates >= 1")

    def block(rng, size):
        return int(np.count_nonzero(draw(spec, rng, (size, k)).sum(axis=1) > x))

    count = sum(run_blocks(block, replicates, seed, "sum_survival", workers))
    return binomial_estimate(count, replicates)


def sum_samples(
    spec: DistributionSpec, k: int, replicates: int, seed: int = 0, label: str = "sums", workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Return (sums, maxima) of ``replicates`` independent k-tuples."""

    def block(rng, size):
        x = draw(spec, rng, (size, k))
        return x.sum(axis=1), x.max(axis=1)

    parts = run_blocks(block, replicates, seed, label, workers)
    return concat([p[0] for p in parts]), concat([p[1] for p in parts])
