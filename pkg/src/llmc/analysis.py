"""Experiment harnesses: top-k coverage curves and start-string sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .dtmc import build_dtmc
from .errors import LlmcError
from .pctl import CheckResult, check, parse_query
from .tokens import TokenProvider


@dataclass(frozen=True)
class CoverageRow:
    k: int
    mean_mass: float
    sample_count: int


@dataclass
class CoverageReport:
    rows: list[CoverageRow]


@dataclass
class SweepRow:
    variant: str
    result: CheckResult | None
    states: int
    transitions: int
    error: str | None = None


@dataclass
class SweepReport:
    query: str
    rows: list[SweepRow]


def topk_coverage(provider: TokenProvider, prompts: list[str], ks: list[int]) -> CoverageReport:
    """Mean cumulative mass of each prompt's k most probable tokens."""
    if not prompts:
        raise ValueError("prompts must be nonempty")
    if not ks or sorted(ks) != list(ks) or ks[0] < 1:
        raise ValueError("ks must be positive and sorted ascending")
    sums = [0.0] * len(ks)
    for idx, prompt in enumerate(prompts):
        try:
            dist = provider.next_distribution(prompt, ks[-1])
        except LlmcError as exc:
            raise type(exc)(f"{exc} [prompt #{idx}]") from exc
        probs = [p for _, p in dist.entries]
        for j, k in enumerate(ks):
            sums[j] += math.fsum(probs[:k])
    n = len(prompts)
    return CoverageReport(
        rows=[CoverageRow(k=k, mean_mass=sums[j] / n, sample_count=n) for j, k in enumerate(ks)]
    )


def synonym_sweep(base_config, variants: list[str], query_text: str) -> SweepReport:
    """Build + check each variant start string with the shared bounds.

    `base_config` is a RunConfig; per-variant errors are reported inline
    without aborting the remaining variants.
    """
    if not variants:
        raise ValueError("variants must be nonempty")
    query = parse_query(query_text, [s.name for s in base_config.quantifiers])
    rows: list[SweepRow] = []
    for variant in variants:
        try:
            dtmc, stats = build_dtmc(
                base_config.make_provider(),
                variant,
                base_config.alpha,
                base_config.k,
                base_config.horizon,
                base_config.quantifiers,
                state_cap=base_config.state_cap,
            )
            result = check(dtmc, query)
            rows.append(
                SweepRow(
                    variant=variant,
                    result=result,
                    states=stats.state_count,
                    transitions=stats.transition_count,
                )
            )
        except LlmcError as exc:
            rows.append(SweepRow(variant=variant, result=None, states=0, transitions=0,
                                 error=str(exc)))
    return SweepReport(query=query_text, rows=rows)


def coverage_to_csv(report: CoverageReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "mean_mass", "n"])
    for row in report.rows:
        writer.writerow([row.k, f"{row.mean_mass:.17g}", row.sample_count])
    return buf.getvalue()


def coverage_to_json(report: CoverageReport) -> str:
    return json.dumps(
        {"rows": [{"k": r.k, "mean_mass": r.mean_mass, "n": r.sample_count} for r in report.rows]},
        indent=2,
    )


def sweep_to_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variant", "probability", "states", "transitions"])
    for row in report.rows:
        prob = "" if row.result is None else f"{row.result.probability:.17g}"
        writer.writerow([row.variant, prob, row.states, row.transitions])
    return buf.getvalue()


def sweep_to_json(report: SweepReport) -> str:
    rows = []
    for row in report.rows:
        item = {"variant": row.variant, "states": row.states, "transitions": row.transitions}
        if row.result is not None:
            item["probability"] = row.result.probability
        if row.error is not None:
            item["error"] = row.error
        rows.append(item)
    return json.dumps({"query": report.query, "rows": rows}, indent=2)
