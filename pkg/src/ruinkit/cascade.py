"""Cascade sizes from branching processes and network contagion.

Independent shocks with a subcritical branching ratio stay small; at the
critical ratio sizes follow a power law with survival exponent 1/2. Barriers
(partitions with no cross-transmission) cap how far a cascade can spread.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np
from scipy import special

from .errors import AmbiguousClassificationError, ConfigurationError, ParameterDomainError
from .rng import concat, run_blocks
from .tail_diagnostics import TailDiagnosticsReport, classify_tail, tail_report

NODE_CAP = 10_000_000
EDGE_MODELS = ("ring", "lattice", "complete", "random")


@dataclass
class CascadeConfig:
    model: str = "branching"
    m: float = 0.5
    nodes: int = 100
    edge_model: str = "ring"
    edge_p: float = 0.05  # link probability for the seeded random graph
    graph_seed: int = 0
    transmission: float = 0.5
    barriers: list[list[int]] | None = None
    replicates: int = 10_000
    seed: int = 0
    node_cap: int = NODE_CAP

    def __post_init__(self):
        if self.model not in ("branching", "network"):
            raise ConfigurationError(f"unknown cascade model {self.model!r}")
        if not self.m >= 0:
            raise ConfigurationError("offspring mean m must be >= 0")
        if not 0 <= self.transmission <= 1:
            raise ConfigurationError("transmission probability must lie in [0, 1]")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        if self.model == "network":
            if self.edge_model not in EDGE_MODELS:
                raise ConfigurationError(f"unknown edge model {self.edge_model!r}")
            if self.nodes < 1:
                raise ConfigurationError("empty graph: nodes must be >= 1")
            if self.barriers is not None:
                flat = sorted(v for part in self.barriers for v in part)
                if flat != list(range(self.nodes)):
                    raise ConfigurationError("barriers must partition the nodes 0..nodes-1")

    def echo(self) -> dict:
        return asdict(self)


@dataclass
class CascadeSample:
    sizes: np.ndarray
    config: CascadeConfig
    seed: int
    capped: int = 0
    meta: dict = field(default_factory=dict)


def borel_pmf(m: float, n: int) -> float:
    """P(total progeny = n) for Poisson(m) offspring: e^{-mn} (mn)^{n-1} / n!."""
    if not 0 < m <= 1:
        raise ParameterDomainError(f"Borel law needs 0 < m <= 1, got {m}")
    if n < 1:
        raise ParameterDomainError("n must be >= 1")
    mn = m * n
    return math.exp(-mn + (n - 1) * math.log(mn) - special.gammaln(n + 1))


def borel_pmf_array(m: float, n_max: int) -> np.ndarray:
    """pmf at n = 1..n_max (index 0 holds n=1)."""
    if not 0 < m <= 1:
        raise ParameterDomainError(f"Borel law needs 0 < m <= 1, got {m}")
    n = np.arange(1, n_max + 1, dtype=float)
    return np.exp(-m * n + (n - 1) * np.log(m * n) - special.gammaln(n + 1))


def run_branching(config: CascadeConfig, workers: int = 1) -> CascadeSample:
    """Galton-Watson trees with Poisson(m) offspring, one per replicate.

    Generations are drawn whole: a generation of z nodes has Poisson(m z)
    children. Trees reaching ``node_cap`` total nodes stop there and are
    counted in ``capped``.
    """
    if config.model != "branching":
        raise ConfigurationError("run_branching needs model='branching'")
    m, cap = config.m, config.node_cap

    def block(rng, size):
        total = np.ones(size, dtype=np.int64)
        current = np.ones(size, dtype=np.int64)
        alive = np.arange(size)
        if m == 0:
            return total, 0
        capped = 0
        while alive.size:
            children = rng.poisson(m * current[alive])
            total[alive] += children
            current[alive] = children
            over = total[alive] >= cap
            if over.any():
                capped += int(np.count_nonzero(over))
                total[alive[over]] = cap
            alive = alive[(children > 0) & ~over]
        return total, capped

    parts = run_blocks(block, config.replicates, config.seed, "branching", workers)
    sizes = concat([p[0] for p in parts]).astype(np.int64)
    return CascadeSample(sizes, config, config.seed, capped=sum(p[1] for p in parts))


def build_graph(config: CascadeConfig) -> nx.Graph:
    n = config.nodes
    if config.edge_model == "ring":
        g = nx.cycle_graph(n)
    elif config.edge_model == "complete":
        g = nx.complete_graph(n)
    elif config.edge_model == "lattice":
        side = math.isqrt(n)
        if side * side != n:
            raise ConfigurationError("lattice needs a square node count")
        g = nx.convert_node_labels_to_integers(nx.grid_2d_graph(side, side), ordering="sorted")
    else:
        g = nx.gnp_random_graph(n, config.edge_p, seed=config.graph_seed)
    if config.barriers is not None:
        part = {v: i for i, block in enumerate(config.barriers) for v in block}
        g.remove_edges_from([(u, v) for u, v in list(g.edges) if part[u] != part[v]])
    return g


def _adjacency(g: nx.Graph) -> list[np.ndarray]:
    return [np.array(sorted(g.neighbors(v)), dtype=np.int64) for v in range(g.number_of_nodes())]


def run_network_contagion(config: CascadeConfig, workers: int = 1) -> CascadeSample:
    """Independent cascade on a static graph from one random seed node.

    Each newly affected node gets one chance to pass the shock along each of
    its edges, independently with the transmission probability. Edges that
    cross a barrier were removed when the graph was built.
    """
    if config.model != "network":
        raise ConfigurationError("run_network_contagion needs model='network'")
    g = build_graph(config)
    if g.number_of_nodes() == 0:
        raise ConfigurationError("empty graph")
    adj = _adjacency(g)
    n, t = config.nodes, config.transmission

    def one(rng) -> int:
        affected = np.zeros(n, dtype=bool)
        start = int(rng.integers(n))
        affected[start] = True
        frontier = [start]
        count = 1
        while frontier:
            nxt = []
            for v in frontier:
                nbrs = adj[v]
                if not nbrs.size:
                    continue
                hit = nbrs[rng.random(nbrs.size) < t]
                for u in hit[~affected[hit]]:
                    if not affected[u]:
                        affected[u] = True
                        nxt.append(int(u))
                        count += 1
            frontier = nxt
        return count

    def block(rng, size):
        return np.array([one(rng) for _ in range(size)], dtype=np.int64)

    sizes = concat(run_blocks(block, config.replicates, config.seed, "network", workers))
    return CascadeSample(sizes.astype(np.int64), config, config.seed)


def run_cascade(config: CascadeConfig, workers: int = 1) -> CascadeSample:
    if config.model == "branching":
        return run_branching(config, workers)
    return run_network_contagion(config, workers)


def component_sizes(config: CascadeConfig) -> list[int]:
    """Largest size each node's cascade could reach (its connected component)."""
    g = build_graph(config)
    out = [0] * g.number_of_nodes()
    for comp in nx.connected_components(g):
        for v in comp:
            out[v] = len(comp)
    return out


def aggregate_tail_report(sample: CascadeSample, k: int | None = None) -> TailDiagnosticsReport:
    """Tail diagnostics of the cascade sizes (max-to-sum path and Hill index).

    Classification is attempted; a disagreement between diagnostics is
    recorded in ``notes`` rather than raised, since the report is still useful.
    """
    if len(sample.sizes) < 1000:
        raise ParameterDomainError("aggregate_tail_report needs at least 1000 cascade sizes")
    sizes = np.asarray(sample.sizes, dtype=float)
    report = tail_report(sizes, k=k, classify=False)
    deepest = report.convolution_ratios[-1].ratio if report.convolution_ratios else None
    try:
        report.tail_class = classify_tail(
            report.hill_alpha, report.max_to_sum_path[-1][1], deepest, report.exp_moment_probe
        )
    except AmbiguousClassificationError as exc:
        report.notes.append(str(exc))
    return report


def survival_slope(sizes: Sequence[int], lo: float, hi: float, points: int = 20) -> float:
    """Least-squares slope of log P(size > s) against log s over [lo, hi]."""
    sizes = np.sort(np.asarray(sizes))
    grid = np.unique(np.geomspace(lo, hi, points).round())
    surv = 1.0 - np.searchsorted(sizes, grid, side="right") / len(sizes)
    if np.any(surv <= 0):
        raise ParameterDomainError("empty survival at the top of the fitting range")
    slope, _ = np.polyfit(np.log(grid), np.log(surv), 1)
    return float(slope)
