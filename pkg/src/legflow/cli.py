"""Command-line surface: plan, run, bench, ablate, stress, trace, serve."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import data_path
from .architect import ArchitectFailure, ArchitectRequest, propose_plan, revise_plan
from .evaluator import (
    CorpusEntry,
    CostModel,
    Harness,
    load_corpus,
    run_adversarial_stress,
    run_ablation,
    run_benchmark,
    run_fault_stress,
    run_paraphrase_stress,
    run_scaling_stress,
    tally_cost,
)
from .executor import VARIANT_FULL, VARIANTS, Executor, static_leg
from .gateway import ProviderConfig, ScriptedBackend, Usage, UsageLedger
from .leg import compile_leg, render_ascii
from .provenance import Ledger
from .registry import catalog_for_architect, load_registry
from .reports import ablation_markdown, benchmark_markdown, cost_markdown, stress_markdown
from .runtime import live_model_factory, scripted_model_factory
from .tools import FaultPlan, FixtureBackend, HttpBackend


@dataclass
class CliConfig:
    registry_path: Path
    patterns_path: Path
    heuristics_path: Path
    scenarios_dir: Path
    fixtures_path: Path
    corpus_dir: Path
    ledger_dir: Path | None
    out_dir: Path
    input_rate: float = 3.00
    output_rate: float = 15.00
    width: int = 1
    round_cap: int = 8
    provider: ProviderConfig | None = None

    @staticmethod
    def load(path: str | None) -> "CliConfig":
        doc: dict = {}
        if path:
            p = Path(path)
            if not p.exists():
                raise click.ClickException(f"config file not found: {path}")
            doc = json.loads(p.read_text())
        base = Path(doc["data_dir"]) if "data_dir" in doc else None

        def _p(key: str, default: Path) -> Path:
            if key in doc:
                return Path(doc[key])
            return default

        provider = None
        if "provider" in doc:
            pd = doc["provider"]
            provider = ProviderConfig(
                endpoint=pd["endpoint"],
                dialect=pd.get("dialect", "openai"),
                model_id=pd.get("model_id", ""),
                api_key_env=pd.get("api_key_env", ""),
                supports_images=pd.get("supports_images", True),
            )
        cfg = CliConfig(
            registry_path=_p("registry", (base / "registry.json") if base else data_path("registry.json")),
            patterns_path=_p("patterns", (base / "patterns.json") if base else data_path("patterns.json")),
            heuristics_path=_p("heuristics", (base / "heuristics.txt") if base else data_path("heuristics.txt")),
            scenarios_dir=_p("scenarios_dir", (base / "scenarios") if base else data_path("scenarios")),
            fixtures_path=_p("fixtures", (base / "fixtures" / "world.json") if base else data_path("fixtures", "world.json")),
            corpus_dir=_p("corpus_dir", (base / "corpus") if base else data_path("corpus")),
            ledger_dir=Path(doc["ledger_dir"]) if "ledger_dir" in doc else None,
            out_dir=Path(doc.get("out_dir", "reports")),
            input_rate=float(doc.get("input_rate", 3.00)),
            output_rate=float(doc.get("output_rate", 15.00)),
            width=int(doc.get("width", 1)),
            round_cap=int(doc.get("round_cap", 8)),
            provider=provider,
        )
        for p in (cfg.registry_path, cfg.patterns_path, cfg.heuristics_path, cfg.scenarios_dir, cfg.fixtures_path, cfg.corpus_dir):
            if not Path(p).exists():
                raise click.ClickException(f"configured path does not exist: {p}")
        return cfg

    def make_harness(self, scripted: bool = True) -> Harness:
        if scripted:
            factory = scripted_model_factory(self.scenarios_dir)
            tools = FixtureBackend(self.fixtures_path)
        else:
            if self.provider is None:
                raise click.ClickException("live mode requires a provider config")
            factory = live_model_factory(self.provider)
            endpoints = self.corpus_dir.parent / "endpoints.json"
            tools = HttpBackend(endpoints) if endpoints.exists() else FixtureBackend(self.fixtures_path)
        ledger_dir = self.ledger_dir
        return Harness(
            registry=load_registry(self.registry_path),
            heuristics_text=self.heuristics_path.read_text(),
            model_factory=factory,
            tool_backend=tools,
            patterns=json.loads(self.patterns_path.read_text()),
            ledger_factory=(lambda: Ledger(ledger_dir)) if ledger_dir else Ledger,
            round_cap=self.round_cap,
            width=self.width,
        )


def _write_report(out_dir: Path, name: str, doc: dict, markdown: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    slim = {k: v for k, v in doc.items() if k != "runs"}
    (out_dir / f"{name}.json").write_text(json.dumps(slim, indent=1, sort_keys=True) + "\n")
    (out_dir / f"{name}.md").write_text(markdown)
    click.echo(f"wrote {out_dir / name}.json and .md")


def _scenario_backend(cfg: CliConfig, name: str) -> ScriptedBackend:
    for candidate in (name, name.upper(), name.lower()):
        path = cfg.scenarios_dir / f"{candidate}.json"
        if path.exists():
            return ScriptedBackend(path)
    raise click.ClickException(f"no scenario script named {name!r} under {cfg.scenarios_dir}")


@click.group()
@click.option("--config", envvar="LEGFLOW_CONFIG", default=None, help="Path to a JSON config file.")
@click.pass_context
def main(ctx: click.Context, config: str | None) -> None:
    """Layer-execution-graph runtime and evaluation harness."""
    ctx.obj = CliConfig.load(config)


@main.command()
@click.argument("query")
@click.option("--scripted", "scenario", default=None, help="Scenario script name for a replayed planner.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_obj
def plan(cfg: CliConfig, query: str, scenario: str | None, as_json: bool) -> None:
    """Propose and compile an execution graph for QUERY."""
    harness = cfg.make_harness(scripted=scenario is not None)
    model = _scenario_backend(cfg, scenario) if scenario else harness.model_factory(None, "plan")  # type: ignore[arg-type]
    try:
        proposed = propose_plan(
            ArchitectRequest(
                query_text=query,
                catalog=tuple(catalog_for_architect(harness.registry)),
                heuristics_text=harness.heuristics_text,
            ),
            model,
            harness.registry,
            harness.patterns,
        )
    except ArchitectFailure as e:
        raise click.ClickException(str(e))
    leg = compile_leg(proposed.plan, harness.registry)
    if as_json:
        click.echo(json.dumps({"plan": proposed.plan.to_dict(), "leg": leg.to_dict(), "rewrite_log": list(proposed.rewrite_log)}, indent=1, sort_keys=True))
    else:
        click.echo(render_ascii(leg))
        click.echo("")
        click.echo(json.dumps(proposed.plan.to_dict(), indent=1, sort_keys=True))
        if proposed.rewrite_log:
            click.echo(f"rewrites applied: {', '.join(proposed.rewrite_log)}")


def _interactive_signoff(cfg: CliConfig, harness: Harness, model, query: str, proposed):
    """Sign-off loop over stdin: approve / revise: <text> / abort."""
    revision = 0
    while True:
        leg = compile_leg(proposed.plan, harness.registry)
        click.echo(render_ascii(leg))
        click.echo("approve, revise: <feedback>, or abort?")
        line = sys.stdin.readline()
        if not line:
            raise click.ClickException("input stream closed before approval")
        line = line.strip()
        if line == "approve":
            return proposed
        if line == "abort":
            raise click.ClickException("aborted at sign-off")
        if line.startswith("revise:"):
            feedback = line[len("revise:"):].strip()
            proposed = revise_plan(
                ArchitectRequest(
                    query_text=query,
                    catalog=tuple(catalog_for_architect(harness.registry)),
                    heuristics_text=harness.heuristics_text,
                    revision_feedback=feedback,
                    prior_plan=proposed.plan,
                ),
                model,
                harness.registry,
                harness.patterns,
                prior_revision=revision,
            )
            revision = proposed.revision
            continue
        click.echo(f"unrecognized command: {line!r}")


@main.command()
@click.argument("query")
@click.option("--approve-auto/--interactive", "auto", default=True, help="Skip or run the sign-off loop.")
@click.option("--variant", type=click.Choice(VARIANTS), default=VARIANT_FULL)
@click.option("--fault", "fault_agent", default=None, help="Force one specialist's tool calls to fail.")
@click.option("--scripted", "scenario", default=None, help="Scenario script name for a fully replayed run.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def run(cfg: CliConfig, query: str, auto: bool, variant: str, fault_agent: str | None, scenario: str | None, as_json: bool) -> None:
    """Plan, sign off, and execute QUERY end to end."""
    harness = cfg.make_harness(scripted=scenario is not None)
    model = _scenario_backend(cfg, scenario) if scenario else harness.model_factory(None, variant)  # type: ignore[arg-type]
    usage = UsageLedger()
    if variant == "fixed_graph":
        leg = static_leg(harness.registry)
    else:
        proposed = propose_plan(
            ArchitectRequest(
                query_text=query,
                catalog=tuple(catalog_for_architect(harness.registry)),
                heuristics_text=harness.heuristics_text,
            ),
            model,
            harness.registry,
            harness.patterns,
        )
        if not auto:
            proposed = _interactive_signoff(cfg, harness, model, query, proposed)
        usage.accumulate("architect", proposed.usage)
        leg = compile_leg(proposed.plan, harness.registry)
    ledger = harness.ledger_factory()
    executor = Executor(
        registry=harness.registry,
        model=model,
        tools=harness.tool_backend,
        ledger=ledger,
        round_cap=cfg.round_cap,
        width=cfg.width,
    )
    fault = FaultPlan(fault_agent) if fault_agent else None
    result = executor.execute(leg, query, variant=variant, fault=fault, usage=usage)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "final_text": result.final_text,
                    "trace_id": result.trace_id,
                    "failed": result.failed,
                    "usage_by_stage": {k: v.to_dict() for k, v in sorted(result.usage_by_stage.items())},
                },
                indent=1,
                sort_keys=True,
            )
        )
    else:
        click.echo(result.final_text)
        click.echo(f"\ntrace: {result.trace_id}  tokens: {result.usage_total.total:,}")
    if result.failed:
        raise click.ClickException(result.error or "run failed")


def _load_corpus_arg(cfg: CliConfig, corpus: str) -> list[CorpusEntry]:
    path = Path(corpus)
    if not path.exists():
        path = cfg.corpus_dir / f"{corpus}.json"
    if not path.exists():
        raise click.ClickException(f"corpus not found: {corpus}")
    return load_corpus(path)


@main.command()
@click.argument("corpus", default="benchmark")
@click.option("--variant", type=click.Choice(VARIANTS), default=VARIANT_FULL)
@click.option("--out", "out_dir", default=None)
@click.pass_obj
def bench(cfg: CliConfig, corpus: str, variant: str, out_dir: str | None) -> None:
    """Run the benchmark corpus and emit the category-table report."""
    entries = _load_corpus_arg(cfg, corpus)
    harness = cfg.make_harness(scripted=True)
    report = run_benchmark(entries, harness, variant)
    md = benchmark_markdown(report)
    click.echo(md)

    runs = report["runs"]
    per_query_cost = []
    stage_totals: dict[str, Usage] = {}
    for qid, qrun in sorted(runs.items()):
        total = qrun.result.usage_total
        for stage, u in qrun.result.usage_by_stage.items():
            stage_totals[stage] = stage_totals.get(stage, Usage()) + u
        model = CostModel(cfg.input_rate, cfg.output_rate)
        per_query_cost.append({"id": qid, "tokens": total.total, "cost": model.cost(total), "time_s": qrun.latency_s})
    tally = tally_cost(stage_totals, CostModel(cfg.input_rate, cfg.output_rate), query_count=len(entries))
    cost_md = cost_markdown(per_query_cost, stage_totals, tally)
    click.echo(cost_md)
    _write_report(Path(out_dir or cfg.out_dir), f"bench_{variant}", report, md + "\n" + cost_md)
    if report["errors"]:
        raise click.ClickException(f"{len(report['errors'])} run errors")


@main.command()
@click.argument("subset", default="ablation_subset")
@click.option("--scripted", "scenario_set", default="full", help="Scripted fixture set to replay (default: full).")
@click.option("--out", "out_dir", default=None)
@click.pass_obj
def ablate(cfg: CliConfig, subset: str, scenario_set: str, out_dir: str | None) -> None:
    """Baseline vs single-component-disabled runs over the subset corpus."""
    ids_path = cfg.corpus_dir / f"{subset}.json"
    if ids_path.exists():
        ids = json.loads(ids_path.read_text())
        by_id = {e.id: e for e in _load_corpus_arg(cfg, "benchmark")}
        try:
            entries = [by_id[i] for i in ids]
        except KeyError as e:
            raise click.ClickException(f"subset id {e} not in benchmark corpus")
    else:
        entries = _load_corpus_arg(cfg, subset)
    harness = cfg.make_harness(scripted=True)
    report = run_ablation(entries, harness)
    md = ablation_markdown(report)
    click.echo(md)
    _write_report(Path(out_dir or cfg.out_dir), "ablation", report, md)


@main.command()
@click.argument("kind", type=click.Choice(["scaling", "paraphrase", "adversarial", "fault"]))
@click.option("--out", "out_dir", default=None)
@click.pass_obj
def stress(cfg: CliConfig, kind: str, out_dir: str | None) -> None:
    """Robustness suites: scaling, paraphrase, adversarial, fault."""
    harness = cfg.make_harness(scripted=True)
    if kind == "scaling":
        doc = json.loads((cfg.corpus_dir / "scaling.json").read_text())
        by_id = {e.id: e for e in _load_corpus_arg(cfg, "benchmark")}
        for extra in doc.get("extra_entries", []):
            by_id[extra["id"]] = CorpusEntry.from_dict(extra)
        levels = {int(k): [by_id[i] for i in ids] for k, ids in doc["levels"].items()}
        report = run_scaling_stress(levels, harness)
    elif kind == "paraphrase":
        doc = json.loads((cfg.corpus_dir / "paraphrase.json").read_text())
        groups = {g["group"]: [CorpusEntry.from_dict(e) for e in g["entries"]] for g in doc}
        report = run_paraphrase_stress(groups, harness)
    elif kind == "adversarial":
        doc = json.loads((cfg.corpus_dir / "adversarial.json").read_text())
        report = run_adversarial_stress(doc, harness)
    else:
        doc = json.loads((cfg.corpus_dir / "fault.json").read_text())
        report = run_fault_stress(
            CorpusEntry.from_dict(doc["entry"]), doc["fault_agents"], harness, doc["limitation_pattern"]
        )
    md = stress_markdown(kind, report)
    click.echo(md)
    _write_report(Path(out_dir or cfg.out_dir), f"stress_{kind}", report, md)


@main.command()
@click.argument("trace_id")
@click.option("--ledger-dir", default=None, help="Directory holding trace JSONL files.")
@click.option("--tool", default=None)
@click.option("--outcome", default=None)
@click.option("--node", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def trace(cfg: CliConfig, trace_id: str, ledger_dir: str | None, tool: str | None, outcome: str | None, node: str | None, as_json: bool) -> None:
    """Query one trace's provenance records."""
    directory = Path(ledger_dir) if ledger_dir else cfg.ledger_dir
    if directory is None:
        raise click.ClickException("no ledger directory configured; pass --ledger-dir")
    path = Path(directory) / f"{trace_id}.jsonl"
    if not path.exists():
        raise click.ClickException(f"unknown trace: {trace_id}")
    records = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    out = []
    for r in records:
        if tool is not None and r.get("tool_name") != tool:
            continue
        if outcome is not None and r.get("outcome") != outcome:
            continue
        if node is not None and r.get("node_id") != node:
            continue
        out.append(r)
    if as_json:
        click.echo(json.dumps(out, indent=1, sort_keys=True))
    else:
        for r in out:
            kind = r.get("kind")
            if kind == "tool_call":
                click.echo(f"[{r['seq']}] {r['node_id']} {r['tool_name']} -> {r['outcome']}")
            elif kind == "node":
                click.echo(f"[{r['seq']}] node {r['node_id']} ({r['stage']})")
            else:
                click.echo(f"[{r['seq']}] {kind}")
        if not out:
            click.echo("(no records matched)")


@main.command()
@click.option("--port", default=8700)
@click.option("--host", default="127.0.0.1")
@click.option("--static-dir", default=None, help="Directory with the built console bundle.")
@click.option("--scripted/--live", "scripted", default=True)
@click.pass_obj
def serve(cfg: CliConfig, port: int, host: str, static_dir: str | None, scripted: bool) -> None:
    """Serve the gateway API (and the console bundle, if built)."""
    import uvicorn

    from .service import GatewayService, create_app

    harness = cfg.make_harness(scripted=scripted)
    service = GatewayService(harness, ledger=Ledger(cfg.ledger_dir) if cfg.ledger_dir else Ledger())
    default_static = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    static = static_dir or (str(default_static) if default_static.exists() else None)
    app = create_app(service, static_dir=static)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
