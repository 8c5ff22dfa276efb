#!/usr/bin/env python3
"""
treeaut - automorphism groups of random trees

Exact |Aut| of trees, exact samplers for the random tree models, the
mean/variance constants of log|Aut|, and a Monte-Carlo check of the
log-normal limit laws.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Union

from treeaut import __version__
from treeaut.automorphism import aut_rooted, aut_unrooted, brute_force_aut, vertex_orbits
from treeaut.config import default_config, load_config
from treeaut.constants import (
    Family,
    mu_sigma_bounded_degree,
    mu_sigma_labeled,
    mu_sigma_polya,
    unrooted_gf_check,
)
from treeaut.enumeration import enumerate_rooted_trees, enumerate_unrooted_trees
from treeaut.errors import ConfigError, TreeautError
from treeaut.experiments import (
    ExperimentConfig,
    read_samples_csv,
    run_clt_experiment,
    sample_log_aut,
    summarize_samples,
)
from treeaut.generating import c_coeff, cN_coeff, polya_counts, solve_polya_weighted
from treeaut.logging_config import setup_logging
from treeaut.offspring import PRESETS, get_preset
from treeaut.random_stream import RandomStream
from treeaut.series import ExactSeries, PowerSeries
from treeaut.textio import format_edges, format_parens, parse_tree
from treeaut.trees import RootedTree

logger = logging.getLogger(__name__)

# Known values of the constants, used by --expect checks.
REFERENCE_CONSTANTS = {
    "labeled-rooted": (0.0522901, 0.0394984),
    "full-binary": (0.0939359, 0.0252103),
    "pruned-binary": (0.0145850, 0.0084835),
    "polya-rooted": (0.1373423, 0.1967696),
}

CONSTANTS_FAMILIES = ("labeled", "polya") + tuple(name for name in PRESETS if name != "labeled")

SERIES_KINDS = ("polya", "partition", "rooted-counts", "unrooted-counts")


def _int_list(text: str):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got {text!r}")


def _float_list(text: str):
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}")


def cmd_sample(args, config) -> int:
    family = Family(args.family)
    root = RandomStream(args.seed)
    overrides = {
        "rejection_budget": config.samplers.rejection_budget,
        "unrooted_budget_factor": config.samplers.unrooted_budget_factor,
        "polya_table_size": config.samplers.polya_table_size,
    }
    for index in range(args.count):
        _, tree = sample_log_aut(family, args.n, root.substream(0, index), overrides)
        if isinstance(tree, RootedTree):
            print(format_parens(tree, canonical=False))
        else:
            if index:
                print()
            sys.stdout.write(format_edges(tree))
    return 0


def cmd_aut(args, config) -> int:
    text = Path(args.file).read_text() if args.file else (args.tree or sys.stdin.read())
    tree = parse_tree(text)
    rooted = isinstance(tree, RootedTree)
    aut = aut_rooted(tree) if rooted else aut_unrooted(tree)
    print(aut.exact)
    print(repr(aut.log_value))
    if args.check:
        limit = config.enumeration.brute_force_rooted_cap if rooted else config.enumeration.brute_force_unrooted_cap
        oracle = brute_force_aut(tree, limit=limit)
        if oracle.exact != aut.exact:
            logger.error(f"Brute force gives {oracle.exact}, recursion gives {aut.exact}")
            return 1
        logger.info("Brute-force count agrees")
    if args.orbits:
        if rooted:
            raise ConfigError("aut --orbits needs a free tree given as an edge list")
        limit = config.enumeration.exact_orbit_cap
        blocks = vertex_orbits(tree, exact=args.exact, limit=limit)
        for block in blocks:
            print(" ".join(str(v) for v in block))
        if args.check and not args.exact:
            exact = vertex_orbits(tree, exact=True, limit=limit)
            if exact != blocks:
                logger.error(f"Automorphism search gives orbits {exact}, rerooting gives {blocks}")
                return 1
            logger.info("Orbits agree with the automorphism search")
    return 0


def _series_for(args, config) -> Union[PowerSeries, ExactSeries]:
    order = args.order or config.series.polya_order
    if args.kind == "polya":
        return solve_polya_weighted(args.t, order, args.cutoff, t_bound=config.series.weighted_t_bound)
    if args.kind == "partition":
        cap = config.series.partition_cap
        if args.cutoff is None:
            coefficients = [c_coeff(j, args.t, cap) for j in range(1, order + 1)]
        else:
            coefficients = [cN_coeff(j, args.t, args.cutoff, cap) for j in range(1, order + 1)]
        return PowerSeries([0.0] + coefficients)
    rooted, unrooted = polya_counts(order)
    return rooted if args.kind == "rooted-counts" else unrooted


def cmd_series(args, config) -> int:
    series = _series_for(args, config)
    if args.output == "-":
        series.to_csv(sys.stdout)
    else:
        with open(args.output, "w", newline="") as f:
            series.to_csv(f)
        logger.info(f"Wrote {len(series)} coefficients to {args.output}")
    return 0


def cmd_count(args, config) -> int:
    rooted, unrooted = polya_counts(args.max)
    print("n,rooted,unrooted")
    for n in range(1, args.max + 1):
        print(f"{n},{rooted[n]},{unrooted[n]}")
    if not args.check:
        return 0
    ok = True
    for n in range(1, min(args.max, config.enumeration.rooted_cap) + 1):
        if len(enumerate_rooted_trees(n, limit=config.enumeration.rooted_cap)) != rooted[n]:
            logger.error(f"Rooted count mismatch at n={n}")
            ok = False
    for n in range(1, min(args.max, config.enumeration.unrooted_cap) + 1):
        if len(enumerate_unrooted_trees(n, limit=config.enumeration.unrooted_cap)) != unrooted[n]:
            logger.error(f"Unrooted count mismatch at n={n}")
            ok = False
    return 0 if ok else 1


def cmd_constants(args, config) -> int:
    series = config.series
    if args.family == "labeled":
        report = mu_sigma_labeled(args.jmax or series.labeled_j_max, args.order or series.labeled_order, series.tolerance)
        reference = REFERENCE_CONSTANTS["labeled-rooted"]
    elif args.family == "polya":
        report = mu_sigma_polya(args.order or series.polya_order, args.cutoff, args.above, series.rho_order, series.tolerance)
        reference = REFERENCE_CONSTANTS["polya-rooted"] if args.cutoff is None else None
    else:
        report = mu_sigma_bounded_degree(get_preset(args.family), args.order or series.class_order, series.tolerance)
        reference = REFERENCE_CONSTANTS.get(args.family)
    print(report.to_json())

    ok = report.converged
    if args.expect and reference is not None:
        mu, sigma2 = reference
        if abs(report.mu - mu) > args.mu_tolerance or abs(report.sigma2 - sigma2) > args.sigma2_tolerance:
            logger.error(f"{report.family}: ({report.mu}, {report.sigma2}) differs from ({mu}, {sigma2})")
            ok = False
    if args.unrooted_check:
        check = unrooted_gf_check(args.t_values, args.n_max)
        print(json.dumps({"unrooted_check": {"passed": check.passed, "max_abs": check.max_abs_discrepancy}}))
        ok = ok and check.passed
    return 0 if ok else 1


def cmd_clt(args, config) -> int:
    if args.from_csv:
        with open(args.from_csv, newline="") as f:
            family, samples = read_samples_csv(f)
        report = summarize_samples(family, samples, config.experiments.significance)
    else:
        if args.seed is None:
            raise ConfigError("clt: --seed is required when sampling")
        experiment = ExperimentConfig(
            family=args.family,
            sizes=args.sizes,
            samples=args.samples,
            seed=args.seed,
            workers=args.workers or config.experiments.workers,
            output=args.output,
            chunk_size=config.experiments.chunk_size,
            audit_fraction=config.experiments.audit_fraction,
            significance=config.experiments.significance,
            overrides={
                "rejection_budget": config.samplers.rejection_budget,
                "unrooted_budget_factor": config.samplers.unrooted_budget_factor,
                "polya_table_size": config.samplers.polya_table_size,
            },
        )
        report = run_clt_experiment(experiment)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    else:
        print(report.to_json(), file=sys.stderr)

    ok = report.passed
    reference = REFERENCE_CONSTANTS.get(report.family)
    if args.expect and reference is not None:
        mu, sigma2 = reference
        ok = ok and report.mean_slope_consistent(mu) and report.variance_slope_consistent(sigma2)
    if not ok:
        logger.warning(f"{report.family}: Monte-Carlo checks failed")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="treeaut - automorphism groups of random trees")
    parser.add_argument("--version", action="version", version=f"treeaut {__version__}")
    parser.add_argument("--debug", action="store_true", help="Show debug log output on console")
    parser.add_argument("--config", default=None, help="Path to configuration file (default: config.yaml if present)")
    sub = parser.add_subparsers(dest="command", required=True)
    families = [f.value for f in Family]

    p = sub.add_parser("sample", help="Sample random trees")
    p.add_argument("--family", required=True, choices=families)
    p.add_argument("--n", type=int, required=True, help="Tree order")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("aut", help="Print |Aut| and log|Aut| of a tree")
    p.add_argument("tree", nargs="?", help="Parenthesis string or edge list (default: stdin)")
    p.add_argument("--file", help="Read the tree from a file")
    p.add_argument("--check", action="store_true", help="Compare with the brute-force count (and orbits)")
    p.add_argument("--orbits", action="store_true", help="Also print the vertex orbits of a free tree, one per line")
    p.add_argument("--exact", action="store_true", help="Orbits by automorphism search (small trees only)")
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("count", help="Print r_n and u_n")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--check", action="store_true", help="Compare with exhaustive enumeration")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("constants", help="Compute mu and sigma^2 as JSON")
    p.add_argument("--family", required=True, choices=CONSTANTS_FAMILIES)
    p.add_argument("--order", type=int, help="Truncation order (N or B_max)")
    p.add_argument("--jmax", type=int, help="Labeled: terms of the sum over j")
    p.add_argument("--cutoff", type=int, help="Polya: constants of the cutoff functional")
    p.add_argument("--above", action="store_true", help="Polya: use F^{>cutoff} instead of F^{<=cutoff}")
    p.add_argument("--expect", action="store_true", help="Fail unless the known values are reproduced")
    p.add_argument("--mu-tolerance", type=float, default=1e-4)
    p.add_argument("--sigma2-tolerance", type=float, default=3e-3)
    p.add_argument("--unrooted-check", action="store_true", help="Also check U(x, t) against enumeration")
    p.add_argument("--t-values", type=_float_list, default=[-1.0, -0.5, 0.0, 0.3])
    p.add_argument("--n-max", type=int, default=12)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("series", help="Write series coefficients as n,coefficient CSV")
    p.add_argument("--kind", choices=SERIES_KINDS, default="polya",
                   help="polya: p_n(t); partition: c(j, t); rooted-counts / unrooted-counts: r_n / u_n")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--order", type=int, help="Truncation order (default: series.polya_order)")
    p.add_argument("--cutoff", type=int, help="Keep the n! tolls only for n <= cutoff")
    p.add_argument("--output", default="-", help="CSV path, \"-\" for stdout")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser(
        "clt",
        help="Monte-Carlo check of the limit law",
        description="Monte-Carlo check of the limit law. polya-unrooted draws about 0.8 n rooted trees per "
                    "sample; keep its sizes to a few hundred.",
    )
    p.add_argument("--family", choices=families + ["paths"], default="labeled-rooted")
    p.add_argument("--sizes", type=_int_list, default=[500, 1000, 2000])
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--output", default="-", help="Raw samples CSV path, \"-\" for stdout")
    p.add_argument("--report", help="Write the report JSON here (default: stderr)")
    p.add_argument("--from-csv", help="Summarize an existing samples CSV instead of sampling")
    p.add_argument("--expect", action="store_true", help="Compare slopes with the known constants")
    p.set_defaults(func=cmd_clt)
    return parser


def main(argv=None) -> int:
    """Parse arguments, run one subcommand, and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config)
        elif Path("config.yaml").exists():
            config = load_config("config.yaml")
        else:
            config = default_config()
        setup_logging(
            log_target=config.logging.log_target,
            level="DEBUG" if args.debug else config.logging.log_level,
            console=args.debug,
        )
        logger.debug(f"treeaut v{__version__}: {args.command}")
        return args.func(args, config)
    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except TreeautError as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return 2


def cli():
    """CLI entry point for the treeaut console script."""
    sys.exit(main())


if __name__ == "__main__":
    cli()
