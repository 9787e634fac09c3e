#!/usr/bin/env python3
"""
distgraph-lab CLI
Exact counts and seeded Monte Carlo experiments on random distance graphs G_p(n, n/2, n/4).
"""

import argparse
import sys
import logging
from dataclasses import asdict
from typing import Any, Callable, Dict, List, Optional, Tuple

from config_manager import ConfigManager
from models import CheckMode, OutputFormat, RunConfig
from output_formatter import ResultFormatter
from graphs.common import DistGraphError, ErrorHandler, BINOMIALS, require, validate_n
from graphs.distgraph import (
    build_graph, find_no_common_neighbor_triple, is_vertex_word, stirling_estimates,
    word_from_coordinates, word_to_coordinates,
)
from graphs.exactcount import (
    analytic_M, analytic_M_exact, blockprofile_rooted_count, blockprofile_unrooted_count,
    bruteforce_monomorphisms, bruteforce_rooted_count, ext_sharp_p, partition_vector, poisson_p,
    threshold_p_star, threshold_p_star_alt,
)
from graphs.experiments import (
    ExtSettings, SamplingSettings, convergence_report, default_grid, ext_sweep, lln_check,
    poisson_experiment, threshold_sweep, uniformity_check,
)
from graphs.pattern_factory import PatternFactory
from graphs.patterns import (
    RootedNetwork, automorphism_count, density, is_balanced, is_balanced_network, is_nontrivial,
    is_strictly_balanced, is_strictly_balanced_network, max_density, network_density,
    root_fixing_automorphism_count,
)
from graphs.sampler import RootFilter, tilde_fraction

VERSION = "1.0.0"

Rows = List[Dict[str, Any]]
Result = Tuple[Rows, Dict[str, Any]]

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False):
    """Setup logging configuration; records go to stderr"""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )


class _Parser(argparse.ArgumentParser):
    """Argument errors become usage errors instead of exiting"""

    def error(self, message):
        raise DistGraphError(message, "usage")


# --------------------------------------------------------------------------
# Option helpers

def _need(options: Dict[str, Any], key: str) -> Any:
    if options.get(key) is None:
        raise DistGraphError(f"missing required option --{key.replace('_', '-')}", "usage")
    return options[key]


def _float_list(value: Any, name: str) -> List[float]:
    if isinstance(value, str):
        try:
            return [float(v) for v in value.split(",") if v.strip()]
        except ValueError:
            raise DistGraphError(f"--{name} expects comma-separated numbers (got {value!r})", "usage")
    return [float(v) for v in value]


def _int_list(value: Any, name: str) -> List[int]:
    if isinstance(value, str):
        try:
            return [int(v) for v in value.split(",") if v.strip()]
        except ValueError:
            raise DistGraphError(f"--{name} expects comma-separated integers (got {value!r})", "usage")
    return [int(v) for v in value]


def _root_filter(options: Dict[str, Any]) -> RootFilter:
    f_value = options.get("f_value")
    return RootFilter(float(options["f_exponent"]), int(f_value) if f_value is not None else None)


def _sampling(settings: Dict[str, Any]) -> SamplingSettings:
    return SamplingSettings(
        dense_p_threshold=float(settings["sampling"]["dense_p_threshold"]),
        dense_max_n=int(settings["sampling"]["dense_max_n"]),
        max_vertices=int(settings["graph"]["max_vertices"]),
    )


# --------------------------------------------------------------------------
# Handlers: each returns (rows, summary)

def cmd_graph_info(options, settings) -> Result:
    n = int(_need(options, "n"))
    validate_n(n)
    big_n = BINOMIALS.choose(n, n // 2)
    n1 = BINOMIALS.choose(n // 2, n // 4) ** 2
    n_approx, n1_approx = stirling_estimates(n)
    return [{
        "n": n, "N": big_n, "N1": n1, "edges": big_n * n1 // 2,
        "N_stirling": n_approx, "N1_stirling": n1_approx,
        "N_ratio": big_n / n_approx, "N1_ratio": n1 / n1_approx,
    }], {}


def cmd_graph_pathology(options, settings) -> Result:
    n = int(_need(options, "n"))
    budget = int(options["budget"])
    g = build_graph(n, max_vertices=settings["graph"]["max_vertices"])
    triple = find_no_common_neighbor_triple(g, budget, seed=int(options["seed"]))
    row = {"n": n, "budget": budget, "found": triple is not None}
    if triple is not None:
        for i, word in enumerate(triple, 1):
            row[f"v{i}"] = word_to_coordinates(word, n)
        row["common_neighbors"] = g.common_neighbor_count(triple)
    return [row], {}


def cmd_pattern_analyze(options, settings) -> Result:
    factory = PatternFactory(settings)
    source = options.get("network") or _need(options, "pattern")
    pattern = factory.resolve(source)
    graph = pattern.h if isinstance(pattern, RootedNetwork) else pattern
    row = {
        "pattern": source, "vertices": graph.vcount, "edges": graph.edge_count,
        "density": density(graph), "max_density": max_density(graph),
        "strictly_balanced": is_strictly_balanced(graph), "balanced": is_balanced(graph),
        "automorphisms": automorphism_count(graph),
    }
    if isinstance(pattern, RootedNetwork):
        row.update({
            "roots": pattern.roots, "d": pattern.d, "k": pattern.k, "l": pattern.l,
            "network_density": network_density(pattern),
            "strictly_balanced_network": is_strictly_balanced_network(pattern),
            "balanced_network": is_balanced_network(pattern),
            "nontrivial": is_nontrivial(pattern),
            "root_fixing_automorphisms": root_fixing_automorphism_count(pattern),
        })
    return [row], {}


def cmd_count_mono(options, settings) -> Result:
    f = PatternFactory(settings).resolve_graph(_need(options, "pattern"))
    n = int(_need(options, "n"))
    validate_n(n)
    monomorphisms = blockprofile_unrooted_count(f, n, injective=True)
    a = automorphism_count(f)
    row = {
        "n": n, "monomorphisms": monomorphisms,
        "chains": blockprofile_unrooted_count(f, n, injective=False),
        "automorphisms": a, "copies": monomorphisms // a,
    }
    if options.get("bruteforce"):
        g = build_graph(n, max_vertices=settings["graph"]["max_vertices"])
        row["bruteforce_monomorphisms"] = bruteforce_monomorphisms(f, g)
    return [row], {}


def _parse_roots(text: Any, n: int) -> List[int]:
    items = text.split(",") if isinstance(text, str) else list(text)
    words = []
    for item in items:
        item = str(item).strip()
        require(len(item) == n, f"root {item!r} must have n={n} coordinates")
        word = word_from_coordinates(item)
        require(is_vertex_word(n, word), f"root {item} must have exactly n/2={n // 2} ones")
        words.append(word)
    return words


def cmd_count_rooted(options, settings) -> Result:
    net = PatternFactory(settings).resolve_network(_need(options, "network"))
    n = int(_need(options, "n"))
    validate_n(n)
    roots = _parse_roots(_need(options, "roots"), n)
    require(len(roots) == net.d, f"network has {net.d} roots but {len(roots)} were given")
    pv = partition_vector(n, roots)
    row = {
        "n": n, "roots": [word_to_coordinates(w, n) for w in roots],
        "block_sizes": pv.block_sizes, "x": pv.x,
        "chain_count": blockprofile_rooted_count(net, pv, n),
        "injective_count": blockprofile_rooted_count(net, pv, n, injective=True),
    }
    if options.get("bruteforce"):
        g = build_graph(n, max_vertices=settings["graph"]["max_vertices"])
        row["bruteforce_chain_count"] = bruteforce_rooted_count(net, roots, g, injective=False)
        row["bruteforce_injective_count"] = bruteforce_rooted_count(net, roots, g, injective=True)
    return [row], {}


def cmd_count_analytic(options, settings) -> Result:
    n = int(_need(options, "n"))
    validate_n(n)
    factory = PatternFactory(settings)
    row: Dict[str, Any] = {"n": n}
    if options.get("network"):
        net = factory.resolve_network(options["network"])
        k, l = net.k, net.l
        row["ext_sharp_p"] = ext_sharp_p(net, n)
    elif options.get("pattern"):
        f = factory.resolve_graph(options["pattern"])
        k, l = f.vcount, f.edge_count
        c = float(options["c"]) if options.get("c") is not None else 1.0
        row.update({
            "p_star": threshold_p_star(f, n), "p_star_alt": threshold_p_star_alt(f, n),
            "c": c, "poisson_p": poisson_p(f, n, c),
        })
    else:
        k, l = int(_need(options, "k")), int(_need(options, "l"))
    row.update({"k": k, "l": l, "M": analytic_M(k, l, n), "M_exact": analytic_M_exact(k, l, n)})
    return [row], {}


def cmd_sample_sweep(options, settings) -> Result:
    f = PatternFactory(settings).resolve_graph(_need(options, "pattern"))
    result = threshold_sweep(
        f, int(_need(options, "n")), _float_list(options["alphas"], "alphas"), int(options["trials"]),
        int(options["seed"]), threads=int(options["threads"]), settings=_sampling(settings),
        min_trials=int(settings["experiments"]["min_sweep_trials"]),
    )
    return [asdict(row) for row in result.rows], {"pattern": result.pattern}


def cmd_sample_lln(options, settings) -> Result:
    f = PatternFactory(settings).resolve_graph(_need(options, "pattern"))
    result = lln_check(f, int(_need(options, "n")), float(_need(options, "p")), int(options["trials"]),
                       int(options["seed"]), threads=int(options["threads"]), settings=_sampling(settings))
    rows = [{"n": result.n, "p": result.p, "trials": result.trials, "expected": result.expected,
             "quantile": q, "deviation": v} for q, v in result.quantiles.items()]
    return rows, {"mean_deviation": result.mean_deviation}


def cmd_sample_poisson(options, settings) -> Result:
    f = PatternFactory(settings).resolve_graph(_need(options, "pattern"))
    result = poisson_experiment(
        f, int(_need(options, "n")), float(options["c"]), int(options["trials"]), int(options["seed"]),
        threads=int(options["threads"]), settings=_sampling(settings),
        min_trials=int(settings["experiments"]["min_poisson_trials"]),
    )
    row = {
        "n": result.n, "c": result.c, "p": result.p, "trials": result.trials,
        "lambda_theory": result.lambda_theory, "lambda_exact": result.lambda_exact,
        "lambda_ratio": result.lambda_ratio, "empirical_mean": result.empirical_mean,
        "mean_tolerance": result.mean_tolerance, "tv_distance": result.tv_distance,
    }
    for j, value in result.factorial_moments.items():
        row[f"factorial_moment_{j}"] = value
    return [row], {"empirical_pmf": result.empirical_pmf}


def cmd_ext_sweep(options, settings) -> Result:
    net = PatternFactory(settings).resolve_network(_need(options, "network"))
    ext = ExtSettings(
        mode=CheckMode(options["mode"]), tuples=int(options["tuples"]),
        max_tuples=int(settings["ext"]["max_tuples"]),
        rejection_factor=int(settings["ext"]["rejection_factor"]),
    )
    result = ext_sweep(
        net, int(_need(options, "n")), _float_list(options["multipliers"], "multipliers"),
        int(options["trials"]), _root_filter(options), int(options["seed"]), ext=ext,
        threads=int(options["threads"]), settings=_sampling(settings),
    )
    return [asdict(row) for row in result.rows], {"network": result.pattern}


def cmd_uniformity(options, settings) -> Result:
    source = _need(options, "network")
    net = PatternFactory(settings).resolve_network(source)
    n_list = _int_list(options["n_list"], "n-list")
    for n in n_list:
        validate_n(n)
    results = uniformity_check(net, n_list, _root_filter(options), int(options["samples"]),
                               int(options["seed"]), name=source)
    rows, profiles = [], {}
    for r in results:
        rows.append({
            "n": r.n, "f": r.f, "samples": r.samples, "distinct_x": len(r.x_vectors),
            "min_count": r.min_count, "max_count": r.max_count, "spread": r.spread,
            "reference_M": r.reference_M, "ratio_min": r.ratio_min, "ratio_max": r.ratio_max,
            "zero_ratio": r.zero_ratio,
        })
        profiles[r.n] = [{"x": x, "count": c} for x, c in zip(r.x_vectors, r.counts)]
    return rows, {"profiles": profiles}


def cmd_convergence(options, settings) -> Result:
    f = PatternFactory(settings).resolve_graph(_need(options, "pattern"))
    n_list = _int_list(options["n_list"], "n-list")
    for n in n_list:
        validate_n(n)
    rows = [{"n": r.n, "exact_monomorphisms": r.exact_monomorphisms, "M": r.M, "ratio": r.ratio,
             "ratio_float": float(r.ratio)} for r in convergence_report(f, n_list)]
    return rows, {}


def cmd_tilde_fraction(options, settings) -> Result:
    estimate = tilde_fraction(
        int(_need(options, "n")), int(_need(options, "d")), _root_filter(options),
        int(options["samples"]), int(options["seed"]),
        exact_max_tuples=int(settings["tilde"]["exact_max_tuples"]),
    )
    return [asdict(estimate)], {}


# --------------------------------------------------------------------------
# Parser

def _builtin_defaults(settings: Dict[str, Any], command: str) -> Dict[str, Any]:
    """Defaults from the settings file, specialized per command"""
    experiments = settings["experiments"]
    grid = default_grid(float(experiments["grid_low"]), float(experiments["grid_high"]),
                        int(experiments["grid_points"]))
    defaults = {
        "seed": 0,
        "threads": int(settings["runtime"]["threads"]),
        "format": settings["output"]["format"],
        "f_exponent": float(settings["ext"]["f_exponent"]),
        "tuples": int(settings["ext"]["sampled_tuples"]),
        "mode": CheckMode.EXHAUSTIVE.value,
        "budget": int(settings["pathology"]["budget"]),
        "c": 1.0,
        "alphas": grid,
        "multipliers": grid,
    }
    per_command = {
        "sample sweep": {"trials": 200},
        "sample lln": {"trials": 500},
        "sample poisson": {"trials": 2000},
        "ext sweep": {"trials": 300},
        "uniformity": {"samples": 200, "n_list": [8, 12, 16, 20]},
        "convergence": {"n_list": [8, 12, 16, 20, 24]},
        "tilde fraction": {"samples": int(settings["tilde"]["samples"])},
    }
    defaults.update(per_command.get(command, {}))
    return defaults


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=S,
                        help="Output format (default: from settings, csv)")
    common.add_argument("--out", "-o", default=S, help="Write output to this path instead of stdout")
    common.add_argument("--seed", type=int, default=S, help="Master seed (default: 0)")
    common.add_argument("--threads", type=int, default=S, help="Worker processes (0 = available parallelism)")
    common.add_argument("--config", "-c", default=S, help="JSON run config (bare options or a previous JSON output)")
    common.add_argument("--settings", default=S,
                        help="Settings file path (default: ~/.config/distgraph_lab/config.yaml)")
    common.add_argument("--verbose", "-v", action="store_true", default=S, help="Enable verbose output")

    parser = _Parser(
        prog="rdg",
        description="Exact counting and Monte Carlo experiments on random distance graphs G_p(n, n/2, n/4)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  rdg graph info --n 12
  rdg count mono --pattern k3 --n 8
  rdg ext sweep --network root-edge --n 12 --multipliers 0.5,1,2 --trials 300 --seed 7
        """
    )
    parser.add_argument("--version", action="version", version=f"distgraph-lab v{VERSION}")
    groups = parser.add_subparsers(dest="group", metavar="COMMAND")
    groups.required = True

    def leaf(sub, name: str, command: str, handler: Callable, help_text: str):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(command=command, handler=handler)
        return p

    def source_args(p, pattern: bool = True, network: bool = False):
        if pattern:
            p.add_argument("--pattern", default=S, help="Fixture name or pattern file")
        if network:
            p.add_argument("--network", default=S, help="Fixture name or pattern file with roots")

    def filter_args(p):
        p.add_argument("--f-exponent", dest="f_exponent", type=float, default=S, help="f(n) = floor(n^x) (default 0.6)")
        p.add_argument("--f-value", dest="f_value", type=int, default=S, help="Explicit f value")

    graph = groups.add_parser("graph", help="Complete distance graph").add_subparsers(dest="action", metavar="ACTION")
    graph.required = True
    p = leaf(graph, "info", "graph info", cmd_graph_info, "Vertex count, degree, edges, Stirling forms")
    p.add_argument("--n", type=int, default=S)
    p = leaf(graph, "pathology", "graph pathology", cmd_graph_pathology, "Search three vertices without a common neighbor")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--budget", type=int, default=S)

    pattern = groups.add_parser("pattern", help="Pattern graphs").add_subparsers(dest="action", metavar="ACTION")
    pattern.required = True
    p = leaf(pattern, "analyze", "pattern analyze", cmd_pattern_analyze, "Densities, balance, automorphisms")
    source_args(p, network=True)

    count = groups.add_parser("count", help="Exact counts").add_subparsers(dest="action", metavar="ACTION")
    count.required = True
    p = leaf(count, "mono", "count mono", cmd_count_mono, "Monomorphisms and copies in G(n)")
    source_args(p)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--bruteforce", action="store_true", default=S)
    p = leaf(count, "rooted", "count rooted", cmd_count_rooted, "Rooted counts at a root tuple")
    source_args(p, pattern=False, network=True)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--roots", default=S, help="Comma-separated coordinate strings, e.g. 1100,1010")
    p.add_argument("--bruteforce", action="store_true", default=S)
    p = leaf(count, "analytic", "count analytic", cmd_count_analytic, "M(k,l), thresholds")
    source_args(p, network=True)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--l", type=int, default=S)
    p.add_argument("--c", type=float, default=S)

    sample = groups.add_parser("sample", help="Sampling experiments").add_subparsers(dest="action", metavar="ACTION")
    sample.required = True
    p = leaf(sample, "sweep", "sample sweep", cmd_sample_sweep, "P(X_F > 0) around p*")
    source_args(p)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--alphas", default=S, help="Comma-separated multipliers of p*")
    p.add_argument("--trials", type=int, default=S)
    p = leaf(sample, "lln", "sample lln", cmd_sample_lln, "Relative deviation quantiles of X_F")
    source_args(p)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--p", type=float, default=S)
    p.add_argument("--trials", type=int, default=S)
    p = leaf(sample, "poisson", "sample poisson", cmd_sample_poisson, "Law of X_F against Poisson")
    source_args(p)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--trials", type=int, default=S)

    ext = groups.add_parser("ext", help="Extension property").add_subparsers(dest="action", metavar="ACTION")
    ext.required = True
    p = leaf(ext, "sweep", "ext sweep", cmd_ext_sweep, "P(extension property) around the sharp threshold")
    source_args(p, pattern=False, network=True)
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--multipliers", default=S, help="Comma-separated multipliers of the sharp p")
    p.add_argument("--trials", type=int, default=S)
    p.add_argument("--mode", choices=[m.value for m in CheckMode], default=S)
    p.add_argument("--tuples", type=int, default=S, help="Root tuples per check in sampled mode")
    filter_args(p)

    p = leaf(groups, "uniformity", "uniformity", cmd_uniformity, "Spread of rooted counts over partition vectors")
    source_args(p, pattern=False, network=True)
    p.add_argument("--n-list", dest="n_list", default=S)
    p.add_argument("--samples", type=int, default=S)
    filter_args(p)

    p = leaf(groups, "convergence", "convergence", cmd_convergence, "Exact monomorphisms against M(k,l)")
    source_args(p)
    p.add_argument("--n-list", dest="n_list", default=S)

    tilde = groups.add_parser("tilde", help="Well-spread root tuples").add_subparsers(dest="action", metavar="ACTION")
    tilde.required = True
    p = leaf(tilde, "fraction", "tilde fraction", cmd_tilde_fraction, "Fraction of admitted root tuples")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--d", type=int, default=S)
    p.add_argument("--samples", type=int, default=S)
    filter_args(p)

    return parser


def resolve_options(args: argparse.Namespace, settings: Dict[str, Any],
                    config_manager: ConfigManager) -> Dict[str, Any]:
    """Built-in defaults < settings < --config JSON < explicit flags"""
    explicit = {k: v for k, v in vars(args).items() if k not in ("group", "action", "command", "handler")}
    options = _builtin_defaults(settings, args.command)
    if "config" in explicit:
        options.update(config_manager.load_run_config(explicit["config"], VERSION))
    options.update(explicit)
    return options


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, execute one subcommand and write its result; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except DistGraphError as e:
        print(ErrorHandler.format_error_line(e), file=sys.stderr)
        return ErrorHandler.exit_code(e)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(getattr(args, "verbose", False))

    try:
        config_manager = ConfigManager(getattr(args, "settings", None))
        settings = config_manager.load_config()
        options = resolve_options(args, settings, config_manager)
        run_config = RunConfig(command=args.command, options=options, seed=int(options["seed"]))

        logger.debug(f"Running {args.command} with {run_config.echo()}")
        rows, summary = args.handler(options, settings)

        formatter = ResultFormatter(OutputFormat(options["format"]), VERSION)
        text = formatter.format_result(args.command, run_config.echo(), run_config.seed, rows, summary)
        formatter.write(text, options.get("out"))
        return 0

    except KeyboardInterrupt:
        logger.info("Operation cancelled by user")
        return 1
    except Exception as e:
        error = ErrorHandler.handle_error(e, args.command)
        print(ErrorHandler.format_error_line(error), file=sys.stderr)
        if getattr(args, "verbose", False):
            import traceback
            traceback.print_exc()
        return ErrorHandler.exit_code(error)


def main():
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
