"""Render run reports as markdown tables.

Layouts mirror the published evaluation: the six-category benchmark table,
the ablation delta table, the four stress panels, and the two cost tables.
Latency and timestamps are confined to designated fields/columns so that
scripted reruns produce byte-identical reports everywhere else.
"""
from __future__ import annotations

from .evaluator import MetricScores
from .gateway import Usage

METRIC_ROWS = [
    ("factual_precision", "Factual Precision"),
    ("topology_selection", "Topology Selection"),
    ("agent_f1", "Agent F1"),
    ("source_attribution", "Source Attribution"),
]

CATEGORY_ORDER = [
    "single_nhc",
    "single_fema_noaa",
    "linear_nhc_noaa",
    "linear_nhc_nu",
    "parallel_2track",
    "complex_3track",
    "overall",
]

CATEGORY_LABELS = {
    "single_nhc": "Single NHC",
    "single_fema_noaa": "Single FEMA/NOAA",
    "linear_nhc_noaa": "Linear NHC->NOAA",
    "linear_nhc_nu": "Linear NHC->N+U",
    "parallel_2track": "Parallel 2-Track",
    "complex_3track": "Complex 3-Track",
    "overall": "Overall",
}


def _fmt(v: float) -> str:
    return f"{v:.1f}"


def benchmark_markdown(report: dict) -> str:
    cats = report["categories"]
    columns = [c for c in CATEGORY_ORDER if c in cats] + [c for c in sorted(cats) if c not in CATEGORY_ORDER]
    lines = ["# End-to-end benchmark", ""]
    header = "| Metric | " + " | ".join(CATEGORY_LABELS.get(c, c) for c in columns) + " |"
    sep = "|---" * (len(columns) + 1) + "|"
    lines += [header, sep]
    lines.append("| n | " + " | ".join(str(cats[c]["n"]) for c in columns) + " |")
    for key, label in METRIC_ROWS:
        lines.append(f"| {label} | " + " | ".join(_fmt(cats[c][key]) for c in columns) + " |")
    lines.append("| **Overall Score** | " + " | ".join(f"**{_fmt(cats[c]['overall'])}**" for c in columns) + " |")
    lines.append("| Avg. Latency (s) | " + " | ".join(str(round(cats[c]["avg_latency_s"])) for c in columns) + " |")
    overall = cats.get("overall", {})
    if "pass_rate" in overall:
        lines += ["", f"Pass rate (>=50%): {_fmt(overall['pass_rate'])}%."]
    if report.get("errors"):
        lines += ["", f"Errors: {len(report['errors'])}"] + [f"- {e}" for e in report["errors"]]
    else:
        lines += ["", "0 errors."]
    return "\n".join(lines) + "\n"


def ablation_markdown(report: dict) -> str:
    base = report["baseline"]
    lines = ["# Ablation study", ""]
    variants = list(report["variants"])
    header = "| Metric (%) | Full System | " + " | ".join(f"{v} | Delta" for v in variants) + " |"
    sep = "|---" * (2 + 2 * len(variants)) + "|"
    lines += [header, sep]
    for key, label in METRIC_ROWS:
        row = [f"| {label} | {_fmt(base[key])} |"]
        for v in variants:
            score = report["variants"][v]["scores"][key]
            delta = report["variants"][v]["delta"][key]
            row.append(f" {_fmt(score)} | {delta:+.1f} |")
        lines.append("".join(row))
    row = [f"| Avg. Latency (s) | {round(base['latency_s'])} |"]
    for v in variants:
        row.append(f" {round(report['variants'][v]['scores']['latency_s'])} | - |")
    lines.append("".join(row))
    return "\n".join(lines) + "\n"


def stress_markdown(kind: str, report: dict) -> str:
    lines = [f"# Stress test: {kind}", ""]
    if kind == "scaling":
        lines += ["| Sub-questions | n | Accuracy (%) | Latency (s) |", "|---|---|---|---|"]
        for row in report["rows"]:
            lines.append(f"| {row['sub_questions']} | {row['n']} | {_fmt(row['accuracy'])} | {round(row['avg_latency_s'])} |")
    elif kind == "paraphrase":
        lines += ["| Query | Topo. Agree | Agent Agree | Score sigma (%) |", "|---|---|---|---|"]
        for row in report["rows"]:
            lines.append(
                f"| {row['group']} | {'yes' if row['topology_agreement'] else 'no'} | "
                f"{'yes' if row['agent_agreement'] else 'no'} | {row['score_sigma']:.1f} |"
            )
        o = report["overall"]
        lines.append(f"| Overall | {o['topology_agreement']} | {o['agent_agreement']} | {o['mean_sigma']:.1f} |")
    elif kind == "adversarial":
        lines += ["| ID | Type | Issue Det. | Halluc. Free | Resp. |", "|---|---|---|---|---|"]
        for row in report["rows"]:
            lines.append(
                f"| {row['id']} | {row['type']} | {'yes' if row['issue_detected'] else 'no'} | "
                f"{'yes' if row['hallucination_free'] else 'no'} | {'yes' if row['responsive'] else 'no'} |"
            )
        o = report["overall"]
        lines.append(f"| Overall | | {o['issue_detected']} | {o['hallucination_free']} | {o['responsive']} |")
    elif kind == "fault":
        lines += ["| Failed Source | Partial Answer | Notes Limit. | No Crash |", "|---|---|---|---|"]
        for row in report["rows"]:
            lines.append(
                f"| {row['failed_source']} | {'yes' if row['partial_answer'] else 'no'} | "
                f"{'yes' if row['notes_limitation'] else 'no'} | {'yes' if row['no_crash'] else 'no'} |"
            )
        o = report["overall"]
        lines.append(f"| Overall | {o['partial_answer']} | {o['notes_limitation']} | {o['no_crash']} |")
    return "\n".join(lines) + "\n"


def cost_markdown(per_query: list[dict], stage_totals: dict[str, Usage], tally: dict) -> str:
    lines = ["# Token usage and cost", "", "| ID | Tokens | Cost ($) | Time (s) |", "|---|---|---|---|"]
    for row in per_query:
        lines.append(f"| {row['id']} | {row['tokens']:,} | {row['cost']:.2f} | {round(row['time_s'])} |")
    if per_query:
        avg_tokens = round(sum(r["tokens"] for r in per_query) / len(per_query))
        avg_cost = sum(r["cost"] for r in per_query) / len(per_query)
        lines.append(f"| Average per query | {avg_tokens:,} | {avg_cost:.2f} | - |")
    lines += ["", "| Stage | Input | Output | % of Total |", "|---|---|---|---|"]
    grand = sum(u.total for u in stage_totals.values()) or 1
    for stage in ("architect", "specialist", "consolidator", "reporter"):
        u = stage_totals.get(stage, Usage())
        lines.append(f"| {stage} | {u.input_tokens:,} | {u.output_tokens:,} | {100 * u.total / grand:.1f} |")
    total_in = sum(u.input_tokens for u in stage_totals.values())
    total_out = sum(u.output_tokens for u in stage_totals.values())
    lines.append(f"| Total | {total_in:,} | {total_out:,} | 100.0 |")
    lines += ["", f"Total cost: ${tally['total_cost']:.3f}"]
    if "per_query_average_cost" in tally:
        lines.append(f"Average per query: ${tally['per_query_average_cost']:.2f}")
    return "\n".join(lines) + "\n"


def scores_line(qid: str, scores: MetricScores) -> str:
    return (
        f"{qid}: fp={scores.factual_precision:.3f} topo={scores.topology_selection:.0f} "
        f"f1={scores.agent_f1:.3f} attr={scores.source_attribution:.3f} overall={scores.overall:.3f}"
    )
