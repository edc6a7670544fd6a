"""Convex harm, concentration of stressors, and the 1/n rule.

Fragility here is an operational proxy: the change in expected harm
E[h(|X|)] when the scale of X grows while its location stays put. Harm
functions come from a fixed set of named forms so that the command line
never evaluates user code.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate

from .distributions import DistributionSpec, pdf
from .errors import DivergentMomentError, ParameterDomainError


@dataclass(frozen=True)
class HarmFunction:
    """Harm as a function of stressor intensity x >= 0.

    ``growth`` is the power with which harm grows at infinity (0 for bounded
    forms); it decides whether an expectation can exist. ``breakpoints`` are
    kinks or jumps that quadrature should split on.
    """

    name: str
    evaluator: Callable[[np.ndarray], np.ndarray]
    domain_max: float = math.inf
    growth: float = 0.0
    breakpoints: tuple[float, ...] = ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.evaluator(x)
        return float(out) if out.ndim == 0 else out


def power_harm(p: float, domain_max: float = math.inf) -> HarmFunction:
    if p <= 0:
        raise ParameterDomainError("power harm needs p > 0")
    return HarmFunction(f"power:{p:g}", lambda x: np.power(x, p), domain_max, growth=p)


def linear_harm(a: float = 1.0, domain_max: float = math.inf) -> HarmFunction:
    if a < 0:
        raise ParameterDomainError("linear harm needs a >= 0")
    return HarmFunction(f"linear:{a:g}", lambda x: a * x, domain_max, growth=1.0)


def threshold_harm(t: float, domain_max: float = math.inf) -> HarmFunction:
    """0 below ``t``, 1 at or above: sub-threshold doses do no harm at all."""
    if t <= 0:
        raise ParameterDomainError("threshold must be > 0")
    return HarmFunction(
        f"threshold:{t:g}", lambda x: np.where(x >= t, 1.0, 0.0), domain_max, breakpoints=(t,)
    )


def table_harm(xs, hs, domain_max: float | None = None) -> HarmFunction:
    """Piecewise-linear interpolation of (x, h) points, flat beyond the last point."""
    xs = np.asarray(xs, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if xs.ndim != 1 or xs.shape != hs.shape or len(xs) < 2:
        raise ParameterDomainError("harm table needs at least two (x, h) rows")
    if np.any(np.diff(xs) <= 0):
        raise ParameterDomainError("harm table x values must be strictly increasing")
    if xs[0] != 0 or hs[0] != 0:
        raise ParameterDomainError("harm table must start at (0, 0)")
    if np.any(np.diff(hs) < 0) or np.any(hs < 0):
        raise ParameterDomainError("harm table must be non-negative and nondecreasing")
    dmax = float(xs[-1]) if domain_max is None else domain_max
    return HarmFunction(
        "table", lambda x: np.interp(x, xs, hs), dmax, breakpoints=tuple(float(v) for v in xs[1:-1])
    )


def load_table_harm(path: str | Path) -> HarmFunction:
    with open(path, newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        if reader.fieldnames is None or set(reader.fieldnames) != {"x", "h"}:
            raise ParameterDomainError(f"{path}: harm table needs columns x,h")
        rows = [(float(r["x"]), float(r["h"])) for r in reader]
    return table_harm([r[0] for r in rows], [r[1] for r in rows])


def parse_harm(text: str) -> HarmFunction:
    """Parse ``power:p``, ``linear:a``, ``threshold:t`` or ``table:path``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "power":
            return power_harm(float(arg))
        if kind == "linear":
            return linear_harm(float(arg) if arg else 1.0)
        if kind == "threshold":
            return threshold_harm(float(arg))
    except ValueError as exc:
        raise ParameterDomainError(f"bad harm argument in {text!r}: {exc}") from None
    if kind == "table":
        return load_table_harm(arg)
    raise ParameterDomainError(f"unknown harm form {text!r}")


def convexity_probe(h: HarmFunction, x: float, delta: float) -> float:
    """Second central difference h(x+d) + h(x-d) - 2h(x); > 0 means locally convex."""
    if delta <= 0:
        raise ParameterDomainError("delta must be > 0")
    if x - delta < 0 or x + delta > h.domain_max:
        raise ParameterDomainError(
            f"probe [{x - delta}, {x + delta}] leaves the domain [0, {h.domain_max}]"
        )
    return h(x + delta) + h(x - delta) - 2.0 * h(x)


def concentration_compare(h: HarmFunction, total: float, k: int) -> tuple[float, float]:
    """(harm of one dose ``total``, harm of ``k`` doses of ``total / k``)."""
    if k < 1:
        raise ParameterDomainError("k must be >= 1")
    if total < 0 or total > h.domain_max:
        raise ParameterDomainError(f"total {total} outside [0, {h.domain_max}]")
    return h(total), k * h(total / k)


def expected_harm(h: HarmFunction, spec: DistributionSpec, resolution: int = 200) -> float:
    """E[h(|X|)] by adaptive quadrature on the density.

    ``resolution`` bounds the number of subintervals per piece, which keeps
    the result deterministic.
    """
    tail = spec.power_tail
    if tail is not None and h.growth >= tail:
        raise DivergentMomentError(
            f"E[h(|X|)] diverges: harm grows like x^{h.growth:g} against a tail index {tail:g}"
        )
    cuts = {0.0}
    for b in h.breakpoints:
        cuts.update((b, -b))
    if spec.family == "pareto":
        cuts.add(spec.support_min)
        lower = spec.support_min
    elif spec.family in ("exponential",):
        cuts.add(spec.location)
        lower = spec.location
    elif spec.family == "lognormal":
        lower = 0.0
    else:
        cuts.add(spec.location)
        lower = -math.inf
    pts = sorted(c for c in cuts if c > lower)
    edges = ([lower] if math.isfinite(lower) else [-math.inf]) + pts + [math.inf]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        val, _ = integrate.quad(
            lambda x: h(abs(x)) * pdf(spec, x), a, b, limit=resolution, epsabs=1e-13, epsrel=1e-12
        )
        total += val
    return total


def fragility_measure(
    h: HarmFunction,
    spec: DistributionSpec,
    sigma_lo: float,
    sigma_hi: float,
    resolution: int = 200,
) -> float:
    """E[h(|X|)] at scale ``sigma_hi`` minus at ``sigma_lo``, location fixed.

    Positive means the exposure is harmed by uncertainty.
    """
    if sigma_hi < sigma_lo or sigma_lo <= 0:
        raise ParameterDomainError("need 0 < sigma_lo <= sigma_hi")
    if not spec.is_location_scale and spec.family != "lognormal":
        raise ParameterDomainError(f"{spec.family} has no scale to spread")
    if sigma_hi == sigma_lo:
        # still validates integrability
        expected_harm(h, spec.with_scale(sigma_lo), resolution)
        return 0.0
    return expected_harm(h, spec.with_scale(sigma_hi), resolution) - expected_harm(
        h, spec.with_scale(sigma_lo), resolution
    )


# -- 1/n rule ------------------------------------------------------------------


def _exact(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class PortfolioSpec:
    n: int
    q: float
    theta: float = 1.0
    correlation: str = "independent"  # or "common_shock"
    rho: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterDomainError("n must be an integer >= 1")
        for name in ("q", "theta", "rho"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ParameterDomainError(f"{name} must lie in [0, 1], got {v}")
        if self.correlation not in ("independent", "common_shock"):
            raise ParameterDomainError(f"unknown correlation model {self.correlation!r}")

    @property
    def ruin_count(self) -> int:
        """Failed sources needed for ruin: ceil(theta * n)."""
        return math.ceil(_exact(self.theta) * self.n)


def _binomial_tail(n: int, q: Fraction, m: int) -> Fraction:
    return sum(
        (Fraction(math.comb(n, j)) * q**j * (1 - q) ** (n - j) for j in range(m, n + 1)),
        Fraction(0),
    )


def one_over_n_ruin(spec: PortfolioSpec, exact: bool = False):
    """Probability that at least ceil(theta * n) of n sources fail.

    Independent sources give a Binomial(n, q) tail. Under a common shock
    with weight rho, all sources share one failure draw with probability
    rho, so ruin occurs with probability q (or 1 if no failure is needed).
    Evaluated in exact rational arithmetic; ``exact=True`` returns the Fraction.
    """
    q = _exact(spec.q)
    m = spec.ruin_count
    independent = _binomial_tail(spec.n, q, m)
    if spec.correlation == "common_shock":
        rho = _exact(spec.rho)
        shared = q if m > 0 else Fraction(1)
        value = rho * shared + (1 - rho) * independent
    else:
        value = independent
    return value if exact else float(value)
