"""Command-line front end: build, check, export, coverage, sweep."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis
from .config import load_config
from .dtmc import build_dtmc
from .errors import LlmcError
from .pctl import check, parse_query
from .prism import export_prism, export_properties

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llmc",
        description="Bounded DTMC verification of language-model text generation.",
    )
    parser.add_argument("--state-cap", type=int, default=None, help="override state budget")
    parser.add_argument("--no-timing", action="store_true", help="omit timing fields from reports")
    parser.add_argument("--output-dir", type=Path, default=None, help="override output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="build the DTMC and evaluate every query")
    p_check.add_argument("config", type=Path)

    p_export = sub.add_parser("export", help="write PRISM model and properties files")
    p_export.add_argument("config", type=Path)

    p_cov = sub.add_parser("coverage", help="top-k cumulative mass over a prompt set")
    p_cov.add_argument("--provider", type=Path, required=True, help="provider config JSON")
    p_cov.add_argument("--prompts", type=Path, required=True, help="one prompt per line")
    p_cov.add_argument("--ks", required=True, help="comma-separated ascending k values")

    p_sweep = sub.add_parser("sweep", help="run one query across variant start strings")
    p_sweep.add_argument("config", type=Path)
    p_sweep.add_argument("--variants", type=Path, required=True, help="one start string per line")
    p_sweep.add_argument("--query", required=True)
    return parser


def _prepare(config_path: Path, args):
    cfg = load_config(config_path)
    if args.state_cap is not None:
        cfg.state_cap = args.state_cap
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg


def cmd_check(args) -> int:
    cfg = _prepare(args.config, args)
    feature_names = [q.name for q in cfg.quantifiers]
    queries = [(text, parse_query(text, feature_names)) for text in cfg.queries]

    dtmc, stats = build_dtmc(
        cfg.make_provider(), cfg.start, cfg.alpha, cfg.k, cfg.horizon,
        cfg.quantifiers, state_cap=cfg.state_cap,
    )

    build_doc = {
        "states": stats.state_count,
        "transitions": stats.transition_count,
        "provider_calls": stats.provider_calls,
    }
    if not args.no_timing:
        build_doc["wall_time_ms"] = stats.wall_time_ms

    violated = False
    results = []
    print(f"{'query':<44} {'probability':>12} {'satisfied':>10}")
    for text, query in queries:
        res = check(dtmc, query)
        row = {
            "query": text,
            "probability": res.probability,
            "states": stats.state_count,
            "transitions": stats.transition_count,
        }
        if res.satisfied is not None:
            row["satisfied"] = res.satisfied
            violated = violated or not res.satisfied
        if not args.no_timing:
            row["check_time_ms"] = res.check_time_ms
        results.append(row)
        shown = "-" if res.satisfied is None else str(res.satisfied)
        print(f"{text:<44} {res.probability:>12.6f} {shown:>10}")

    out = cfg.output_dir / "result.json"
    out.write_text(
        json.dumps({"build": build_doc, "results": results}, indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {out}")
    return EXIT_VIOLATED if violated else EXIT_OK


def cmd_export(args) -> int:
    cfg = _prepare(args.config, args)
    feature_names = [q.name for q in cfg.quantifiers]
    queries = [parse_query(text, feature_names) for text in cfg.queries]

    dtmc, _ = build_dtmc(
        cfg.make_provider(), cfg.start, cfg.alpha, cfg.k, cfg.horizon,
        cfg.quantifiers, state_cap=cfg.state_cap,
    )
    model_path = cfg.output_dir / f"{cfg.run_name}.pm"
    model_path.write_text(export_prism(dtmc).text, encoding="utf-8", newline="\n")
    props_path = cfg.output_dir / f"{cfg.run_name}.props"
    props = export_properties(queries)
    if not props:
        props = "// no queries declared\n"
    props_path.write_text(props, encoding="utf-8", newline="\n")
    print(f"wrote {model_path} and {props_path}")
    return EXIT_OK


def cmd_coverage(args) -> int:
    provider_doc = json.loads(args.provider.read_text(encoding="utf-8"))
    from .config import _build_provider

    provider = _build_provider(provider_doc, args.provider.parent)
    prompts = [ln for ln in args.prompts.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not prompts:
        print("error: no prompts", file=sys.stderr)
        return EXIT_ERROR
    ks = [int(x) for x in args.ks.split(",")]
    report = analysis.topk_coverage(provider, prompts, ks)
    out_dir = args.output_dir or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "coverage.csv").write_text(analysis.coverage_to_csv(report), encoding="utf-8")
    (out_dir / "coverage.json").write_text(analysis.coverage_to_json(report), encoding="utf-8")
    for row in report.rows:
        print(f"k={row.k}: mean_mass={row.mean_mass:.6f} (n={row.sample_count})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _prepare(args.config, args)
    variants = [ln for ln in args.variants.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not variants:
        print("error: no variants", file=sys.stderr)
        return EXIT_ERROR
    report = analysis.synonym_sweep(cfg, variants, args.query)
    (cfg.output_dir / "sweep.csv").write_text(analysis.sweep_to_csv(report), encoding="utf-8")
    (cfg.output_dir / "sweep.json").write_text(analysis.sweep_to_json(report), encoding="utf-8")
    for row in report.rows:
        if row.error is not None:
            print(f"{row.variant!r}: error: {row.error}")
        else:
            print(f"{row.variant!r}: probability={row.result.probability:.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "check": cmd_check,
        "export": cmd_export,
        "coverage": cmd_coverage,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except LlmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
