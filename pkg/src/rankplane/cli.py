"""Command-line surface: synthesize graphs, rank them, and emit analysis CSVs.

Subcommands
-----------
synth          seeded scale-free edge list
rank           edge list -> rank table TSV + JSON run manifest
stats density  rank table -> log-rank grid CSV (optionally a null-model grid)
stats slice    rank table -> diagonal density profile CSV
stats correlator  rank table -> single correlator point CSV
stats fitcurve rank table -> binned power-law fit CSV
overlap        curve / window / subset-window comparison CSVs
subset         rank table + name file -> densely re-ranked sub-table

Exit codes: 0 success, 2 parse/input error, 3 convergence failure,
4 contract violation.  All data outputs are deterministic for a fixed
input, configuration, and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ContractViolation, ConvergenceError, ParseError
from .googlerank import DEFAULT_ALPHA, DEFAULT_MAX_ITER, DEFAULT_TOL, cheirank, pagerank
from .graph import load_edge_list, load_node_subset, write_edge_list
from .netstats import (
    CorrelatorPoint,
    correlator,
    density_grid,
    fit_power_law,
    generate_scale_free,
    grid_from_rank_pairs,
    rank_curve,
    sample_independent,
    slice_density,
    write_correlator_points,
    write_density_grid,
    write_eta_slice,
    write_power_law_fit,
)
from .overlap import (
    load_ranked_list,
    overlap_curve,
    subset_window_fraction,
    window_overlap,
    write_overlap_series,
)
from .twodrank import build_rank_table, read_rank_table, subset_rank, write_rank_table

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3
EXIT_CONTRACT = 4

DEFAULT_GRID_CELLS = 100
DEFAULT_WINDOW = 20


@dataclass(frozen=True)
class RunConfig:
    """Bundle of knobs shared across the pipeline commands."""

    alpha: float = DEFAULT_ALPHA
    alpha_star: float = DEFAULT_ALPHA
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    grid_cells: int = DEFAULT_GRID_CELLS
    window: int = DEFAULT_WINDOW
    seed: int | None = None
    workers: int = 1


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fit_range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}")
    try:
        return float(lo), float(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from exc


# ---- commands ---------------------------------------------------------------


def cmd_synth(args: argparse.Namespace) -> int:
    g = generate_scale_free(
        n=args.n,
        mu_in=args.mu_in,
        mu_out=args.mu_out,
        mean_degree=args.mean_degree,
        seed=args.seed,
    )
    write_edge_list(g, args.output)
    print(
        f"generated {g.n_nodes} nodes, {g.n_edges} distinct edges "
        f"(total weight {g.total_edge_weight}) -> {args.output}"
    )
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    config = RunConfig(
        alpha=args.alpha,
        alpha_star=args.alpha_star,
        tol=args.tol,
        max_iter=args.max_iter,
        workers=args.workers,
    )
    g = load_edge_list(args.edges)
    p = pagerank(
        g, alpha=config.alpha, tol=config.tol, max_iter=config.max_iter, workers=config.workers
    )
    p_star = cheirank(
        g,
        alpha_star=config.alpha_star,
        tol=config.tol,
        max_iter=config.max_iter,
        workers=config.workers,
    )
    kappa = correlator(p, p_star).kappa
    table = build_rank_table(
        g.names,
        p.values,
        p_star.values,
        meta={
            "graph_hash": g.content_hash(),
            "alpha": args.alpha,
            "alpha_star": args.alpha_star,
            "tol": args.tol,
            "max_iter": args.max_iter,
            "n_nodes": g.n_nodes,
        },
    )
    write_rank_table(table, args.output)

    manifest = {
        "command": "rank",
        "config": asdict(config),
        "input": {
            "path": str(args.edges),
            "sha256": _sha256(args.edges),
            "graph_hash": g.content_hash(),
            "n_nodes": g.n_nodes,
            "n_edges": g.n_edges,
            "total_edge_weight": g.total_edge_weight,
            "dangling_nodes": int(np.count_nonzero(g.out_weight() == 0)),
        },
        "solves": {
            "pagerank": {"iterations": p.iterations, "residual": p.residual},
            "cheirank": {"iterations": p_star.iterations, "residual": p_star.residual},
        },
        "kappa": kappa,
        "outputs": {"table": str(args.output)},
    }
    manifest_path = args.manifest or f"{args.output}.manifest.json"
    Path(manifest_path).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(
        f"ranked {g.n_nodes} nodes (pagerank {p.iterations} it, cheirank "
        f"{p_star.iterations} it, kappa={kappa:.6g}) -> {args.output}"
    )
    return EXIT_OK


def cmd_stats_density(args: argparse.Namespace) -> int:
    table = read_rank_table(args.table)
    grid = density_grid(table, cells=args.cells)
    write_density_grid(grid, args.output)
    print(f"density grid {grid.cells}x{grid.cells} over {grid.n_samples} nodes -> {args.output}")
    if args.null_samples:
        if args.seed is None:
            raise ContractViolation("--null-samples requires --seed")
        p_curve = np.sort(table.pagerank)[::-1]
        p_star_curve = np.sort(table.cheirank)[::-1]
        ks, k_stars = sample_independent(p_curve, p_star_curve, args.null_samples, args.seed)
        null_grid = grid_from_rank_pairs(ks, k_stars, n_ranks=len(table), cells=args.cells)
        null_path = args.null_output or f"{args.output}.null.csv"
        write_density_grid(null_grid, null_path)
        print(f"null-model grid from {args.null_samples} independent pairs -> {null_path}")
    return EXIT_OK


def cmd_stats_slice(args: argparse.Namespace) -> int:
    table = read_rank_table(args.table)
    grid = density_grid(table, cells=args.cells)
    sl = slice_density(grid, args.x0)
    write_eta_slice(sl, args.output)
    print(f"diagonal profile at x0={args.x0} ({len(sl.eta)} points) -> {args.output}")
    return EXIT_OK


def cmd_stats_correlator(args: argparse.Namespace) -> int:
    table = read_rank_table(args.table)
    n = len(table)
    kappa = n * float(np.dot(table.pagerank, table.cheirank)) - 1.0
    point = CorrelatorPoint(
        kappa=kappa,
        alpha=float(table.meta.get("alpha", DEFAULT_ALPHA)),
        alpha_star=float(table.meta.get("alpha_star", DEFAULT_ALPHA)),
    )
    write_correlator_points([point], args.output)
    print(f"kappa={kappa!r} -> {args.output}")
    return EXIT_OK


def cmd_stats_fitcurve(args: argparse.Namespace) -> int:
    table = read_rank_table(args.table)
    x, y = rank_curve(getattr(table, args.column))
    fit_range = args.fit_range or (1.0, float(len(table)))
    fit = fit_power_law(x, y, fit_range, num_bins=args.bins)
    write_power_law_fit(fit, args.output)
    print(
        f"{args.column} rank curve ~ K^-{fit.exponent:.4f} "
        f"(stderr {fit.stderr:.4f}, R^2 {fit.r_squared:.4f}) -> {args.output}"
    )
    return EXIT_OK


def cmd_overlap_curve(args: argparse.Namespace) -> int:
    a = load_ranked_list(args.list_a)
    b = load_ranked_list(args.list_b)
    ks_max = args.ks_max or min(len(a), len(b))
    series = overlap_curve(a, b, ks_max)
    write_overlap_series(series, args.output)
    print(f"overlap curve to ks={ks_max} -> {args.output}")
    return EXIT_OK


def cmd_overlap_window(args: argparse.Namespace) -> int:
    a = load_ranked_list(args.list_a)
    b = load_ranked_list(args.list_b)
    series = window_overlap(a, b, window=args.window)
    write_overlap_series(series, args.output)
    print(f"{len(series.points)} windows of {args.window} -> {args.output}")
    return EXIT_OK


def cmd_overlap_subset_window(args: argparse.Namespace) -> int:
    ranking = load_ranked_list(args.ranking)
    positions = {name: i for i, name in enumerate(ranking.names)}
    subset, _ = load_node_subset(
        args.subset, positions, label=Path(args.subset).stem, strict=True
    )
    series = subset_window_fraction(ranking, subset, window=args.window)
    write_overlap_series(series, args.output)
    mean = sum(series.fractions()) / len(series.points)
    print(
        f"{len(subset)} members over {len(series.points)} windows "
        f"(mean fraction {mean:.6g}) -> {args.output}"
    )
    return EXIT_OK


def cmd_subset(args: argparse.Namespace) -> int:
    table = read_rank_table(args.table)
    label = args.label or Path(args.subset).stem
    subset, report = load_node_subset(
        args.subset, table.name_index, label=label, strict=args.strict
    )
    sub_table = subset_rank(table, subset)
    write_rank_table(sub_table, args.output)
    if report.unresolved:
        print(
            f"warning: skipped {len(report.unresolved)} unresolved name(s)",
            file=sys.stderr,
        )
    print(f"re-ranked {len(sub_table)}-member subset {label!r} -> {args.output}")
    return EXIT_OK


# ---- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankplane",
        description="Two-axis link analysis of directed graphs: popularity and "
        "communicativity rankings plus rank-plane statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a seeded scale-free edge list")
    sp.add_argument("n", type=int, help="number of nodes (>= 100)")
    sp.add_argument("-o", "--output", required=True, help="edge-list TSV to write")
    sp.add_argument("--mu-in", type=float, default=2.1, help="in-degree tail exponent")
    sp.add_argument("--mu-out", type=float, default=2.76, help="out-degree tail exponent")
    sp.add_argument("--mean-degree", type=float, default=5.0, help="target mean degree")
    sp.add_argument("--seed", type=int, required=True, help="generator seed")
    sp.set_defaults(func=cmd_synth)

    rp = sub.add_parser("rank", help="compute both rankings and the combined rank")
    rp.add_argument("edges", help="edge-list TSV")
    rp.add_argument("-o", "--output", required=True, help="rank table TSV to write")
    rp.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")
    rp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    rp.add_argument("--alpha-star", type=float, default=DEFAULT_ALPHA)
    rp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    rp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    rp.add_argument("--workers", type=int, default=1, help="solver threads")
    rp.set_defaults(func=cmd_rank)

    st = sub.add_parser("stats", help="emit analysis series from a rank table")
    stsub = st.add_subparsers(dest="which", required=True)

    den = stsub.add_parser("density", help="log-rank plane cell densities")
    den.add_argument("table")
    den.add_argument("-o", "--output", required=True)
    den.add_argument("--cells", type=int, default=DEFAULT_GRID_CELLS)
    den.add_argument("--null-samples", type=int, help="also emit an independent-pair null grid")
    den.add_argument("--seed", type=int, help="seed for the null-model sampler")
    den.add_argument("--null-output", help="null grid path (default: <output>.null.csv)")
    den.set_defaults(func=cmd_stats_density)

    sl = stsub.add_parser("slice", help="density profile along a diagonal line")
    sl.add_argument("table")
    sl.add_argument("-o", "--output", required=True)
    sl.add_argument("--x0", type=float, required=True, help="line center in log-rank units")
    sl.add_argument("--cells", type=int, default=DEFAULT_GRID_CELLS)
    sl.set_defaults(func=cmd_stats_slice)

    co = stsub.add_parser("correlator", help="rank-probability correlator of a table")
    co.add_argument("table")
    co.add_argument("-o", "--output", required=True)
    co.set_defaults(func=cmd_stats_correlator)

    fc = stsub.add_parser("fitcurve", help="power-law fit of a rank-probability curve")
    fc.add_argument("table")
    fc.add_argument("-o", "--output", required=True)
    fc.add_argument(
        "--column", choices=("pagerank", "cheirank"), default="pagerank"
    )
    fc.add_argument(
        "--fit-range",
        type=_fit_range,
        metavar="MIN:MAX",
        help="rank range to fit (default: the whole curve)",
    )
    fc.add_argument("--bins", type=int, default=20, help="logarithmic bins")
    fc.set_defaults(func=cmd_stats_fitcurve)

    ov = sub.add_parser("overlap", help="compare ranked name lists")
    ovsub = ov.add_subparsers(dest="mode", required=True)

    cu = ovsub.add_parser("curve", help="cumulative top-ks overlap fraction")
    cu.add_argument("list_a")
    cu.add_argument("list_b")
    cu.add_argument("-o", "--output", required=True)
    cu.add_argument("--ks-max", type=int, help="default: shorter list's length")
    cu.set_defaults(func=cmd_overlap_curve)

    wi = ovsub.add_parser("window", help="fixed-window overlap fraction")
    wi.add_argument("list_a")
    wi.add_argument("list_b")
    wi.add_argument("-o", "--output", required=True)
    wi.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    wi.set_defaults(func=cmd_overlap_window)

    sw = ovsub.add_parser("subset-window", help="subset-membership window fraction")
    sw.add_argument("ranking")
    sw.add_argument("subset")
    sw.add_argument("-o", "--output", required=True)
    sw.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    sw.set_defaults(func=cmd_overlap_subset_window)

    su = sub.add_parser("subset", help="densely re-rank a named subset of a table")
    su.add_argument("table")
    su.add_argument("subset", help="one member name per line")
    su.add_argument("-o", "--output", required=True)
    su.add_argument("--label", help="subset label recorded in the output metadata")
    strictness = su.add_mutually_exclusive_group()
    strictness.add_argument(
        "--strict", dest="strict", action="store_true", default=True,
        help="fail on names missing from the table (default)",
    )
    strictness.add_argument(
        "--lenient", dest="strict", action="store_false",
        help="skip names missing from the table",
    )
    su.set_defaults(func=cmd_subset)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"rankplane: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"rankplane: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ContractViolation as exc:
        print(f"rankplane: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"rankplane: i/o error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
