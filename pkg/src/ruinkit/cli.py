"""Command-line entry point: ``ruinkit <subcommand> [flags]``.

Every subcommand accepts the global flags ``--seed``, ``--replicates``,
``--format``, ``--output``, ``--config`` and ``--workers``. A JSON config
file supplies the same keys as the flags (underscores, no dashes); flags
win. Unknown keys and flags exit with status 2; library errors during a run
exit with status 1.

CSV output starts with ``# ruinkit config: <canonical JSON>``; JSON output
carries the same object under ``"config"``. ``--output`` and ``--workers``
are not part of the echo, so results are byte-identical across both.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from . import __version__
from .cascade import CascadeConfig, aggregate_tail_report, run_cascade
from .distributions import DistributionSpec, quantile, sample
from .errors import ConfigurationError, ParameterDomainError, RuinkitError
from .fragility import (
    PortfolioSpec,
    concentration_compare,
    convexity_probe,
    fragility_measure,
    one_over_n_ruin,
    parse_harm,
)
from .inference_pitfalls import (
    difference_stats,
    effect_for_power,
    luck_quadrant_sim,
    two_test_fallacy_sim,
)
from .ruin_engine import (
    ExposurePolicy,
    WalkSpec,
    exposures_to_ruin_level,
    gambler_ruin_closed_form,
    repeated_exposure_ruin,
    simulate_absorbing_walk,
    simulate_repeated_exposure,
)
from .sensitivity import SweepConfig, information_ratio_sweep, scale_sweep, skepticism_report
from .tail_diagnostics import (
    classify_quadrant,
    convolution_ratio,
    exp_moment_probe,
    hill_estimator,
    max_to_sum,
    sum_max_ratio,
    sum_quantile_mc,
    tail_report,
)


class UsageError(Exception):
    """Bad flag, key or value; maps to exit status 2."""


# -- value parsers -------------------------------------------------------------


def _float_list(text) -> list[float]:
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _spec(text) -> DistributionSpec:
    """A DistributionSpec from a JSON object or a short name like ``student_t:3``."""
    if isinstance(text, dict):
        return DistributionSpec.from_dict(text)
    text = str(text).strip()
    if text.startswith("{"):
        return DistributionSpec.from_json(text)
    name, _, arg = text.partition(":")
    if name in ("student_t", "pareto"):
        return DistributionSpec(name, tail_index=float(arg or 2.0))
    if name == "bernoulli":
        return DistributionSpec.bernoulli(float(arg or 0.5))
    return DistributionSpec(name)


def _spec_list(text) -> list[DistributionSpec]:
    if isinstance(text, list):
        return [_spec(v) for v in text]
    return [_spec(v) for v in str(text).split(",") if v.strip()]


def _barriers(text):
    if text is None or isinstance(text, list):
        return text
    text = str(text)
    if text.startswith("blocks:"):
        return ("blocks", int(text.split(":", 1)[1]))
    return json.loads(text)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    if str(text).lower() in ("1", "true", "yes"):
        return True
    if str(text).lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*options) -> Callable[[Any], str]:
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


@dataclass(frozen=True)
class Param:
    parse: Callable[[Any], Any]
    default: Any = None
    help: str = ""


GLOBAL_PARAMS = {
    "seed": Param(int, 0, "64-bit seed"),
    "replicates": Param(int, None, "Monte Carlo replicate count"),
    "format": Param(_choice("csv", "json"), "json", "output format"),
}

PARAMS: dict[str, dict[str, Param]] = {
    "ruin": {
        "p": Param(float, None, "per-exposure ruin probability (exposure mode)"),
        "n": Param(int, None, "number of exposures"),
        "target": Param(float, None, "report exposures needed to reach this ruin level"),
        "start": Param(float, None, "starting wealth (walk mode)"),
        "step": Param(_spec, None, "step law as JSON or short name"),
        "p_up": Param(float, None, "shorthand for +/-1 steps with this up-probability"),
        "barrier": Param(float, 0.0, "absorbing lower barrier"),
        "upper": Param(float, None, "absorbing upper barrier"),
        "horizon": Param(int, None, "step horizon"),
        "horizon_cap": Param(int, 1_000_000, "cap for unbounded horizons"),
    },
    "tails": {
        "diagnostic": Param(
            _choice("report", "convolution", "sum_max", "max_to_sum", "hill", "exp_moment"),
            "report", "which diagnostic to run",
        ),
        "family": Param(_spec, None, "distribution as JSON or short name"),
        "sample": Param(str, None, "single-column CSV of sample values"),
        "size": Param(int, 100_000, "sample size drawn from --family"),
        "xs": Param(_float_list, None, "comma-separated evaluation points"),
        "quantiles": Param(_float_list, None, "evaluation points as quantile levels"),
        "sum_n": Param(int, 10, "summand count for sum_max"),
        "p": Param(float, 1.0, "moment order for max_to_sum"),
        "k": Param(int, None, "Hill order-statistic count"),
        "epsilons": Param(_float_list, [0.5, 1.0, 2.0], "exponential-moment probe rates"),
    },
    "sweep": {
        "kind": Param(_choice("scale", "ir"), "scale", "scale or information-ratio sweep"),
        "families": Param(_spec_list, None, "comma list, default gaussian,student_t:2,cauchy"),
        "mu": Param(float, 1.0, "benefit (location) for the scale sweep"),
        "sigmas": Param(_float_list, [0.5, 1.0, 2.0, 4.0], "scale grid"),
        "irs": Param(_float_list, [0.0, 0.5, 1.0, 2.0, 5.0, 10.0], "information-ratio grid"),
        "ir_sigma": Param(float, 1.0, "fixed scale for the IR sweep"),
        "k": Param(float, 10.0, "per-period loss level counted as ruin"),
        "horizon": Param(int, 1000, "periods"),
    },
    "fragility": {
        "op": Param(_choice("probe", "concentration", "measure", "portfolio"), "concentration", ""),
        "harm": Param(str, "power:2", "power:p | linear:a | threshold:t | table:path"),
        "x": Param(float, 1.0, "probe point"),
        "delta": Param(float, 1.0, "probe half-width"),
        "total": Param(float, 10.0, "total stressor"),
        "k": Param(int, 10, "number of pieces"),
        "family": Param(_spec, DistributionSpec.gaussian(), "law for the fragility measure"),
        "sigma_lo": Param(float, 1.0, ""),
        "sigma_hi": Param(float, 2.0, ""),
        "resolution": Param(int, 200, "quadrature subinterval limit"),
        "n": Param(int, 1, "number of sources"),
        "q": Param(float, 0.1, "per-source failure probability"),
        "theta": Param(float, 1.0, "failed fraction constituting ruin"),
        "correlation": Param(_choice("independent", "common_shock"), "independent", ""),
        "rho": Param(float, 0.0, "common-shock weight"),
    },
    "cascade": {
        "model": Param(_choice("branching", "network"), "branching", ""),
        "m": Param(float, 0.5, "Poisson offspring mean"),
        "nodes": Param(int, 100, ""),
        "edge_model": Param(_choice("ring", "lattice", "complete", "random"), "ring", ""),
        "edge_p": Param(float, 0.05, "link probability of the random graph"),
        "graph_seed": Param(int, 0, ""),
        "transmission": Param(float, 0.5, ""),
        "barriers": Param(_barriers, None, "JSON list of node lists, or blocks:c"),
        "node_cap": Param(int, 10_000_000, ""),
        "report": Param(_bool, True, "attach the tail report (JSON, >= 1000 sizes)"),
    },
    "compare": {
        "op": Param(_choice("difference", "two_test", "luck"), "difference", ""),
        "x_spec": Param(_spec, None, "law of X (difference)"),
        "y_spec": Param(_spec, None, "law of Y (difference)"),
        "x_file": Param(str, None, "single-column CSV of X"),
        "y_file": Param(str, None, "single-column CSV of Y"),
        "size": Param(int, 100_000, "draws per generated sample"),
        "mode": Param(_choice("paired", "independent"), "independent", ""),
        "effect_x": Param(float, None, ""),
        "effect_y": Param(float, None, ""),
        "power": Param(float, None, "set both effects to reach this per-test power"),
        "n_per_group": Param(int, 50, ""),
        "alpha": Param(float, 0.05, ""),
        "p_luck": Param(float, 0.5, ""),
    },
    "quadrant": {
        "tail": Param(
            _choice("thin", "subexponential", "infinite_variance", "infinite_mean", "fat"), None, ""
        ),
        "scope": Param(_choice("local", "systemic"), None, ""),
    },
}

DEFAULT_REPLICATES = {
    "ruin": 100_000,
    "tails": 1_000_000,
    "cascade": 10_000,
    "compare": 100_000,
}


# -- argument parsing -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line diagnostic, exit 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    for name, param in GLOBAL_PARAMS.items():
        common.add_argument(f"--{name}", dest=name, default=argparse.SUPPRESS, help=param.help)
    common.add_argument("--output", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--workers", default=argparse.SUPPRESS, help="threads for replicate blocks")

    parser = _Parser(prog="ruinkit", description="Ruin and tail-risk analysis.")
    parser.add_argument("--version", action="version", version=f"ruinkit {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    for cmd, params in PARAMS.items():
        p = sub.add_parser(cmd, parents=[common])
        for name, param in params.items():
            p.add_argument(
                f"--{name.replace('_', '-')}", dest=name, default=argparse.SUPPRESS, help=param.help
            )
    return parser


def resolve(argv: list[str]) -> tuple[str, dict[str, Any], dict[str, Any]]:
    """Parse argv and the optional config file into (subcommand, config, runtime options)."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("subcommand", None)
    if cmd is None:
        raise UsageError("missing subcommand")
    runtime: dict[str, Any] = {"output": None, "workers": 1}
    raw: dict[str, Any] = {}
    if "config" in ns:
        path = ns.pop("config")
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        if "subcommand" in data:
            if data.pop("subcommand") != cmd:
                raise UsageError("config key 'subcommand' does not match the command line")
        for key in ("output", "workers"):
            if key in data:
                runtime[key] = data.pop(key)
        raw.update(data)
    for key in ("output", "workers"):
        if key in ns:
            runtime[key] = ns.pop(key)
    raw.update(ns)  # flags override the file

    schema = {**GLOBAL_PARAMS, **PARAMS[cmd]}
    config: dict[str, Any] = {}
    for key, value in raw.items():
        if key not in schema:
            raise UsageError(f"unknown config key '{key}'")
        try:
            config[key] = schema[key].parse(value) if value is not None else None
        except (ValueError, TypeError, RuinkitError, json.JSONDecodeError) as exc:
            raise UsageError(f"invalid value for '{key}': {exc}") from None
    for key, param in schema.items():
        config.setdefault(key, param.default)
    if config["replicates"] is None:
        config["replicates"] = DEFAULT_REPLICATES.get(cmd)
    try:
        runtime["workers"] = int(runtime["workers"])
    except (TypeError, ValueError):
        raise UsageError("invalid value for 'workers'") from None
    return cmd, config, runtime


# -- output ---------------------------------------------------------------------


def _plain(obj):
    """JSON-safe copy: non-finite floats become strings, specs become dicts."""
    if isinstance(obj, DistributionSpec):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def canonical(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


@dataclass
class Result:
    payload: dict[str, Any]
    header: list[str]
    rows: list[list[Any]]


def _cell(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(result: Result, config: dict[str, Any]) -> str:
    if config["format"] == "json":
        return json.dumps(_plain({"config": config, **result.payload}), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# ruinkit config: {canonical(config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _metrics(payload: dict[str, Any]) -> tuple[list[str], list[list[Any]]]:
    rows = [[k, v] for k, v in payload.items() if not isinstance(v, (dict, list))]
    return ["metric", "value"], rows


# -- subcommands ----------------------------------------------------------------


def _read_column(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    values = []
    for i, line in enumerate(lines):
        cell = line.strip().split(",")[0]
        try:
            values.append(float(cell))
        except ValueError:
            if i == 0:
                continue  # header row
            raise UsageError(f"{path}: non-numeric value {cell!r}") from None
    return np.asarray(values)


def run_ruin(c, workers) -> Result:
    if c["p"] is not None:
        if c["n"] is None:
            raise UsageError("missing 'n' for exposure mode")
        policy = ExposurePolicy(c["p"], c["n"])
        payload: dict[str, Any] = {
            "mode": "exposure",
            "ruin_probability": repeated_exposure_ruin(policy),
        }
        if c["target"] is not None:
            payload["exposures_to_target"] = exposures_to_ruin_level(c["p"], c["target"])
        if c["replicates"]:
            sim = simulate_repeated_exposure(policy, c["replicates"], c["seed"])
            payload["simulation"] = sim.to_dict()
            payload["simulated_ruin_probability"] = sim.ruin_probability
        return Result(payload, *_metrics(payload))

    if c["start"] is None:
        raise UsageError("missing 'p' (exposure mode) or 'start' (walk mode)")
    if c["p_up"] is not None:
        step = DistributionSpec.plus_minus_one(c["p_up"])
    elif c["step"] is not None:
        step = c["step"]
    else:
        raise UsageError("missing 'step' or 'p_up' for walk mode")
    walk = WalkSpec(c["start"], step, c["barrier"], c["upper"], c["horizon"])
    report = simulate_absorbing_walk(walk, c["replicates"], c["seed"], c["horizon_cap"], workers=workers)
    payload = {"mode": "walk", **report.to_dict()}
    if c["p_up"] is not None and c["barrier"] == 0 and float(c["start"]).is_integer():
        upper = c["upper"]
        if upper is None or float(upper).is_integer():
            payload["closed_form"] = gambler_ruin_closed_form(
                int(c["start"]), None if upper is None else int(upper), c["p_up"]
            )
    rows = [["ruin_probability", report.ruin_probability], ["ci95_lo", report.ci95[0]],
            ["ci95_hi", report.ci95[1]], ["replicates", report.replicates],
            ["ruined", report.ruined], ["absorbed_upper", report.absorbed_upper],
            ["survived_at_cap", report.survived_at_cap]]
    if "closed_form" in payload:
        rows.append(["closed_form", payload["closed_form"]])
    return Result(payload, ["metric", "value"], rows)


def _tail_points(c, spec: DistributionSpec | None, values, workers) -> list[float]:
    if c["xs"] is not None:
        return c["xs"]
    if c["quantiles"] is None:
        raise UsageError("missing 'xs' or 'quantiles'")
    if c["diagnostic"] == "sum_max":
        return [
            sum_quantile_mc(spec, c["sum_n"], q, c["replicates"], c["seed"] + 1, workers)
            for q in c["quantiles"]
        ]
    if spec is not None:
        return [quantile(spec, q) for q in c["quantiles"]]
    return [float(np.quantile(np.abs(values), q)) for q in c["quantiles"]]


def run_tails(c, workers) -> Result:
    spec = c["family"]
    if c["sample"] is not None:
        values = _read_column(c["sample"])
    elif spec is not None:
        values = None
    else:
        raise UsageError("missing 'family' or 'sample'")
    diag = c["diagnostic"]

    def get_values():
        return values if values is not None else sample(spec, c["size"], c["seed"]).values

    if diag == "convolution":
        source = spec if values is None else values
        pts = convolution_ratio(source, _tail_points(c, spec, values, workers), c["replicates"],
                                c["seed"], workers)
        payload = {"convolution_ratios": [vars(p) for p in pts]}
        return Result(payload, ["x", "ratio", "stderr"], [[p.x, p.ratio, p.stderr] for p in pts])
    if diag == "sum_max":
        if spec is None:
            raise UsageError("sum_max needs 'family'")
        pts = sum_max_ratio(spec, c["sum_n"], _tail_points(c, spec, values, workers),
                            c["replicates"], c["seed"], workers)
        payload = {"sum_max_ratios": [vars(p) for p in pts]}
        return Result(payload, ["n", "x", "ratio_a", "ratio_b"],
                      [[p.n, p.x, p.ratio_a, p.ratio_b] for p in pts])
    if diag == "max_to_sum":
        path = max_to_sum(get_values(), c["p"])
        return Result({"max_to_sum_path": path}, ["n", "r_np"], [list(p) for p in path])
    if diag == "hill":
        alpha, se = hill_estimator(get_values(), c["k"])
        payload = {"hill_alpha": alpha, "hill_stderr": se}
        return Result(payload, *_metrics(payload))
    if diag == "exp_moment":
        verdicts = exp_moment_probe(get_values(), c["epsilons"])
        payload = {"exp_moment_probe": [vars(v) for v in verdicts]}
        return Result(payload, ["epsilon", "verdict", "value"],
                      [[v.epsilon, v.verdict, v.value] for v in verdicts])
    report = tail_report(get_values(), c["k"], c["p"], c["epsilons"])
    payload = {"report": report.to_dict()}
    rows = [["tail_class", report.tail_class], ["hill_alpha", report.hill_alpha],
            ["hill_stderr", report.hill_stderr], ["max_to_sum_final", report.max_to_sum_path[-1][1]]]
    if report.convolution_ratios:
        rows.append(["convolution_ratio_deepest", report.convolution_ratios[-1].ratio])
    return Result(payload, ["metric", "value"], rows)


def run_sweep(c, workers) -> Result:
    kwargs = dict(benefit=c["mu"], uncertainty_grid=c["sigmas"], ir_grid=c["irs"], k=c["k"],
                  horizon=c["horizon"])
    if c["families"] is not None:
        kwargs["families"] = c["families"]
    cfg = SweepConfig(**kwargs)
    payload: dict[str, Any] = {}
    if c["kind"] == "scale":
        result = scale_sweep(cfg)
        if len(cfg.uncertainty_grid) >= 2:
            payload["skepticism"] = [vars(e) for e in skepticism_report(cfg)]
    else:
        result = information_ratio_sweep(cfg, c["ir_sigma"])
    payload["rows"] = [vars(r) for r in result.rows]
    rows = [[r.family, r.mu, r.sigma, r.ir, r.k, r.per_period_ruin, r.horizon_ruin] for r in result.rows]
    return Result(payload, ["family", "mu", "sigma", "ir", "k", "per_period_ruin", "horizon_ruin"], rows)


def run_fragility(c, workers) -> Result:
    op = c["op"]
    if op == "portfolio":
        spec = PortfolioSpec(c["n"], c["q"], c["theta"], c["correlation"], c["rho"])
        payload = {"ruin_probability": one_over_n_ruin(spec), "ruin_count": spec.ruin_count}
        return Result(payload, *_metrics(payload))
    h = parse_harm(c["harm"])
    if op == "probe":
        value = convexity_probe(h, c["x"], c["delta"])
        payload = {"second_difference": value, "convex": value > 0}
    elif op == "concentration":
        conc, dist = concentration_compare(h, c["total"], c["k"])
        payload = {"concentrated_harm": conc, "distributed_harm": dist}
    else:
        value = fragility_measure(h, c["family"], c["sigma_lo"], c["sigma_hi"], c["resolution"])
        payload = {"fragility": value, "fragile": value > 0}
    return Result(payload, *_metrics(payload))


def _resolve_barriers(barriers, nodes: int):
    if isinstance(barriers, tuple) and barriers[0] == "blocks":
        size = barriers[1]
        if size < 1:
            raise UsageError("invalid value for 'barriers': block size must be >= 1")
        return [list(range(i, min(i + size, nodes))) for i in range(0, nodes, size)]
    return barriers


def run_cascade_cmd(c, workers) -> Result:
    cfg = CascadeConfig(
        model=c["model"], m=c["m"], nodes=c["nodes"], edge_model=c["edge_model"],
        edge_p=c["edge_p"], graph_seed=c["graph_seed"], transmission=c["transmission"],
        barriers=_resolve_barriers(c["barriers"], c["nodes"]), replicates=c["replicates"],
        seed=c["seed"], node_cap=c["node_cap"],
    )
    result = run_cascade(cfg, workers)
    sizes = result.sizes
    payload: dict[str, Any] = {
        "replicates": len(sizes),
        "capped": result.capped,
        "mean_size": float(sizes.mean()),
        "max_size": int(sizes.max()),
    }
    if c["report"] and c["format"] == "json" and len(sizes) >= 1000:
        try:
            payload["tail_report"] = aggregate_tail_report(result).to_dict()
        except RuinkitError as exc:
            payload["tail_report_error"] = str(exc)
    return Result(payload, ["size"], [[int(s)] for s in sizes])


def run_compare(c, workers) -> Result:
    op = c["op"]
    if op == "difference":
        def load(file_key, spec_key, label):
            if c[file_key] is not None:
                return _read_column(c[file_key])
            if c[spec_key] is not None:
                return sample(c[spec_key], c["size"], c["seed"] if label == "x" else c["seed"] + 1).values
            raise UsageError(f"missing '{file_key}' or '{spec_key}'")

        report = difference_stats(load("x_file", "x_spec", "x"), load("y_file", "y_spec", "y"),
                                  c["mode"], c["seed"])
        payload = report.to_dict()
        rows = [[f"correct_{k}", v] for k, v in vars(report.correct).items()]
        rows += [[f"naive_{k}", v] for k, v in vars(report.naive).items()]
        rows += [[k, v] for k, v in report.flags.items()]
        return Result(payload, ["metric", "value"], rows)
    if op == "two_test":
        ex, ey = c["effect_x"], c["effect_y"]
        if c["power"] is not None:
            e = effect_for_power(c["power"], c["n_per_group"], c["alpha"])
            ex = e if ex is None else ex
            ey = e if ey is None else ey
        if ex is None or ey is None:
            raise UsageError("missing 'effect_x'/'effect_y' (or 'power')")
        rep = two_test_fallacy_sim(ex, ey, c["n_per_group"], c["alpha"], c["replicates"], c["seed"],
                                   workers)
        payload = rep.to_dict()
        return Result(payload, *_metrics(payload))
    rep = luck_quadrant_sim(c["p_luck"], c["replicates"], c["seed"])
    payload = rep.to_dict()
    rows = [[q, rep.frequencies[q], rep.mean_gap[q]] for q in rep.frequencies]
    return Result(payload, ["quadrant", "frequency", "mean_gap"], rows)


def run_quadrant(c, workers) -> Result:
    if c["tail"] is None or c["scope"] is None:
        raise UsageError("missing 'tail' or 'scope'")
    v = classify_quadrant(c["tail"], c["scope"])
    payload = vars(v).copy()
    return Result(payload, ["quadrant", "tail_class", "scope", "pp_applies"],
                  [[v.quadrant, v.tail_class, v.scope, v.pp_applies]])


RUNNERS = {
    "ruin": run_ruin,
    "tails": run_tails,
    "sweep": run_sweep,
    "fragility": run_fragility,
    "cascade": run_cascade_cmd,
    "compare": run_compare,
    "quadrant": run_quadrant,
}


def parse_and_dispatch(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cmd, config, runtime = resolve(argv)
        result = RUNNERS[cmd](config, runtime["workers"])
        text = render(result, {"subcommand": cmd, **config})
    except UsageError as exc:
        print(f"ruinkit: error: {exc}", file=stderr)
        return 2
    except (ParameterDomainError, ConfigurationError) as exc:
        print(f"ruinkit: error: {exc}", file=stderr)
        return 2
    except RuinkitError as exc:
        print(f"ruinkit: {exc}", file=stderr)
        return 1
    if runtime["output"]:
        with open(runtime["output"], "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())
