from __future__ import annotations

import json
import re

import pytest
from click.testing import CliRunner

from legflow import data_path
from legflow.cli import main

S02_QUERY = "What category was Hurricane Michael when it made landfall in Florida in 2018?"


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def config_file(tmp_path) -> str:
    cfg = {"ledger_dir": str(tmp_path / "ledger"), "out_dir": str(tmp_path / "reports")}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_missing_config_is_error(runner):
    result = runner.invoke(main, ["--config", "/nope/absent.json", "plan", "x"])
    assert result.exit_code != 0


def test_plan_prints_diagram_and_json(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "plan", S02_QUERY, "--scripted", "S02"])
    assert result.exit_code == 0, result.output
    assert "track 0" in result.output
    assert '"topology": "linear"' in result.output


def test_run_scripted_s02(runner, config_file, tmp_path):
    result = runner.invoke(main, ["--config", config_file, "run", S02_QUERY, "--scripted", "s02"])
    assert result.exit_code == 0, result.output
    assert "Category 5" in result.output
    ledger_files = list((tmp_path / "ledger").glob("*.jsonl"))
    assert len(ledger_files) == 1


def test_run_interactive_requires_approve_line(runner, config_file):
    result = runner.invoke(
        main,
        ["--config", config_file, "run", S02_QUERY, "--interactive", "--scripted", "s02"],
        input="approve\n",
    )
    assert result.exit_code == 0, result.output
    assert "Category 5" in result.output


def test_run_interactive_abort_never_executes(runner, config_file, tmp_path):
    result = runner.invoke(
        main,
        ["--config", config_file, "run", S02_QUERY, "--interactive", "--scripted", "s02"],
        input="abort\n",
    )
    assert result.exit_code != 0
    assert "Category 5" not in result.output
    assert list((tmp_path / "ledger").glob("*.jsonl")) == []


def test_run_json_flag(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "run", S02_QUERY, "--scripted", "s02", "--json"])
    assert result.exit_code == 0, result.output
    doc = json.loads(result.output)
    assert "Category 5" in doc["final_text"]
    total = sum(v["input_tokens"] + v["output_tokens"] for v in doc["usage_by_stage"].values())
    assert total == 16_546


def test_trace_filter_on_no_fault_run(runner, config_file, tmp_path):
    result = runner.invoke(main, ["--config", config_file, "run", S02_QUERY, "--scripted", "s02"])
    trace_id = re.search(r"trace: (\S+)", result.output).group(1)
    listed = runner.invoke(main, ["--config", config_file, "trace", trace_id])
    assert listed.exit_code == 0
    assert "nhc_search_storms" in listed.output
    errors = runner.invoke(main, ["--config", config_file, "trace", trace_id, "--outcome", "error"])
    assert errors.exit_code == 0
    assert "no records matched" in errors.output


def test_trace_unknown_id(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "trace", "bogus"])
    assert result.exit_code != 0


def _small_corpus(tmp_path) -> str:
    docs = json.loads(data_path("corpus", "benchmark.json").read_text())
    small = [d for d in docs if d["id"] in ("S02", "O01", "P01")]
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small))
    return str(path)


def test_bench_writes_stable_reports(runner, config_file, tmp_path):
    corpus = _small_corpus(tmp_path)
    r1 = runner.invoke(main, ["--config", config_file, "bench", corpus])
    assert r1.exit_code == 0, r1.output
    out = tmp_path / "reports"
    md1 = (out / "bench_full.md").read_bytes()
    json1 = json.loads((out / "bench_full.json").read_text())
    r2 = runner.invoke(main, ["--config", config_file, "bench", corpus])
    assert r2.exit_code == 0
    md2 = (out / "bench_full.md").read_bytes()
    json2 = json.loads((out / "bench_full.json").read_text())
    assert md1 == md2

    def strip_latency(doc):
        for q in doc["per_query"].values():
            q.pop("latency_s")
        for c in doc["categories"].values():
            c.pop("avg_latency_s")
        return doc

    assert strip_latency(json1) == strip_latency(json2)
    assert "Factual Precision" in md1.decode()


def test_ablate_reports_fixed_graph_topology_delta(runner, config_file, tmp_path):
    result = runner.invoke(main, ["--config", config_file, "ablate", "ablation_subset"])
    assert result.exit_code == 0, result.output
    assert "-28.6" in result.output
    report = json.loads((tmp_path / "reports" / "ablation.json").read_text())
    assert report["variants"]["fixed_graph"]["delta"]["topology_selection"] == pytest.approx(-28.57, abs=0.01)
    assert report["variants"]["no_reporter"]["delta"]["factual_precision"] < 0
    assert report["variants"]["no_reporter"]["delta"]["source_attribution"] > 0


def test_stress_fault_three_of_three(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "stress", "fault"])
    assert result.exit_code == 0, result.output
    assert "3/3" in result.output
    assert "2/3" in result.output


def test_stress_paraphrase_table(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "stress", "paraphrase"])
    assert result.exit_code == 0, result.output
    assert "4/4" in result.output and "2/4" in result.output and "1.2" in result.output


def test_stress_scaling_levels(runner, config_file):
    result = runner.invoke(main, ["--config", config_file, "stress", "scaling"])
    assert result.exit_code == 0, result.output
    for level in ("| 1 |", "| 2 |", "| 3 |", "| 4 |", "| 5 |"):
        assert level in result.output
