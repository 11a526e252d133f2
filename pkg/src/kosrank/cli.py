"""Command-line entry point.

Subcommands: ingest, generate, compute, fuse, trend, evaluate, export-plots.
All take --config pointing at a flat key = value file; --seed and --threads
override the config where they apply.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fusion, pipeline, synthgen
from .citegraph import write_citations
from .config import ConfigError, PipelineConfig, load_config
from .corpus import write_articles
from .hierarchy import write_hierarchy
from .months import year_of
from .plots import rank_chart_svg
from .synthgen import ScenarioConfig, write_changes


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the pipeline config file")
    parser.add_argument("--threads", type=int, default=1, help="parallel months (default 1)")
    parser.add_argument("--seed", type=int, default=None, help="override base_seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kosrank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("ingest", "parse all inputs and print a validation report"),
        ("compute", "per-month aspect scores for the configured window"),
        ("fuse", "fuse aspect rankings into relevance rankings"),
        ("trend", "yearly rank slopes and top/bottom tables"),
        ("evaluate", "cohort tests and aspect correlations"),
        ("export-plots", "SVG rank-trajectory charts"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)

    g = sub.add_parser("generate", help="write a synthetic scenario to the config's input paths")
    _add_common(g)
    g.add_argument("--months", type=int, default=ScenarioConfig.months)
    g.add_argument("--articles-per-month", type=int, default=ScenarioConfig.articles_per_month)
    g.add_argument("--evolving-fraction", type=float, default=ScenarioConfig.evolving_fraction)
    g.add_argument("--evolving-boost", type=float, default=ScenarioConfig.evolving_boost)
    g.add_argument("--retraction-rate", type=float, default=ScenarioConfig.retraction_rate)
    g.add_argument("--refs-mean", type=float, default=ScenarioConfig.refs_mean)
    return parser


def _load(args) -> PipelineConfig:
    return load_config(args.config, base_seed=args.seed)


def _cmd_ingest(cfg: PipelineConfig) -> int:
    data = pipeline.ingest(cfg)
    for line in data.report_lines():
        print(line)
    return 0


def _cmd_generate(cfg: PipelineConfig, args) -> int:
    scenario = ScenarioConfig(
        seed=cfg.base_seed,
        months=args.months,
        articles_per_month=args.articles_per_month,
        first_month=cfg.first_month or ScenarioConfig.first_month,
        evolving_fraction=args.evolving_fraction,
        evolving_boost=args.evolving_boost,
        retraction_rate=args.retraction_rate,
        refs_mean=args.refs_mean,
    )
    hierarchy, store, (citing, cited), changes = synthgen.generate(scenario)
    for key, what in (("hierarchy", "hierarchy"), ("articles", "articles"),
                      ("citations", "citations")):
        if not getattr(cfg, key):
            raise pipeline.PipelineError(f"config does not set the {what} path")
    Path(cfg.hierarchy).parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.hierarchy, "w") as fh:
        write_hierarchy(hierarchy, fh)
    with open(cfg.articles, "w") as fh:
        write_articles(store, fh)
    with open(cfg.citations, "w") as fh:
        write_citations(citing, cited, fh)
    if cfg.changes:
        with open(cfg.changes, "w") as fh:
            write_changes(changes, fh)
    print(
        f"generated {len(store)} articles, {len(citing)} edges, "
        f"{len(hierarchy.nodes)} hierarchy nodes, {len(changes)} change records"
    )
    return 0


def _cmd_export_plots(cfg: PipelineConfig, top: int = 10) -> int:
    rankings = pipeline._load_rankings(cfg)
    window = cfg.window()
    years = sorted({year_of(m) for m in window})
    out = Path(cfg.output_dir) / "plots"
    out.mkdir(parents=True, exist_ok=True)
    scopes = sorted({scope for _, scope in rankings if scope != "global"})
    count = 0
    for scope in scopes:
        monthly = [
            {c: rank for c, (_, rank) in rankings[(m, scope)].items()}
            for m in window
            if (m, scope) in rankings
        ]
        if not monthly:
            continue
        means = fusion.mean_ranks(monthly)
        codes = fusion.top_k_by_mean_rank(means, top)
        series: dict[str, list[float | None]] = {}
        for code in codes:
            ys: list[float | None] = []
            for year in years:
                months = [m for m in window if year_of(m) == year and (m, scope) in rankings]
                ranks = [
                    rankings[(m, scope)][code][1] for m in months if code in rankings[(m, scope)]
                ]
                ys.append(sum(ranks) / len(ranks) if ranks else None)
            series[code] = ys
        svg = rank_chart_svg(
            f"top {len(codes)} concepts, {scope}",
            [str(y) for y in years],
            series,
            config_hash=cfg.config_hash(),
        )
        (out / f"rank_{scope}.svg").write_text(svg)
        count += 1
    print(f"wrote {count} plots to {out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "ingest":
            return _cmd_ingest(cfg)
        if args.command == "generate":
            return _cmd_generate(cfg, args)
        if args.command == "compute":
            written = pipeline.compute(cfg, threads=args.threads)
            print(f"wrote {len(written)} files to {cfg.output_dir}")
            return 0
        if args.command == "fuse":
            path = pipeline.fuse(cfg)
            print(f"wrote {path}")
            return 0
        if args.command == "trend":
            trends, tables = pipeline.trend(cfg)
            print(f"wrote {trends} and {tables}")
            return 0
        if args.command == "evaluate":
            for path in pipeline.run_evaluate(cfg):
                print(f"wrote {path}")
            return 0
        if args.command == "export-plots":
            return _cmd_export_plots(cfg)
    except (ConfigError, pipeline.PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
