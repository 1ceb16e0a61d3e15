import json
from pathlib import Path

import numpy as np
import pytest

from biasnet.cli import cli_main
from biasnet.model import InitSpec, ModelParams, run
from biasnet.graphs import generate_complete
from biasnet.results import (
    CSV_COLUMNS,
    SweepRowRecord,
    read_run_json,
    read_sweep_csv,
    write_run_json,
    write_sweep_csv,
)
from biasnet.sweep import AggregateTable, SweepConfig, TopologySpec, run_sweep

GOLDEN = Path(__file__).parent / "data" / "golden_small_sweep.csv"


def sample_rows():
    return (
        SweepRowRecord("complete", 0.2, 1.0, 0.5, None, "uniform", 10, 0,
                       3.21875, 0.412345, 4.1, 0.123456, 0.01, 54321.5, 0.9),
        SweepRowRecord("lfr", 0.3, 2.0, 0.5, 0.1, "community_fixed_means", 10, 1,
                       4.5, 0.5, 5.0, 0.15, 0.02, 100000.0, 0.0),
    )


class TestSweepCsv:
    def test_line_count(self, tmp_path):
        path = tmp_path / "t.csv"
        write_sweep_csv(AggregateTable(rows=sample_rows()), path)
        assert len(path.read_text().splitlines()) == 3

    def test_round_trip(self, tmp_path):
        path = tmp_path / "t.csv"
        rows = sample_rows()
        write_sweep_csv(AggregateTable(rows=rows), path)
        back = read_sweep_csv(path)
        assert len(back) == 2
        for orig, rec in zip(rows, back):
            for col in CSV_COLUMNS:
                a, b = getattr(orig, col), getattr(rec, col)
                if isinstance(a, float):
                    assert b == pytest.approx(a, rel=1e-5, abs=1e-6)
                else:
                    assert a == b

    def test_empty_table_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_sweep_csv(AggregateTable(rows=()), path)
        assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "t.csv"
        write_sweep_csv(AggregateTable(rows=sample_rows()), path)
        assert b"\r" not in path.read_bytes()

    def test_golden_schema_frozen(self, tmp_path):
        config = SweepConfig(
            topology=TopologySpec(kind="complete", n=16),
            epsilon_values=(0.5, 1.0),
            gamma_values=(0.0,),
            replicates=2,
            max_iterations=200,
            master_seed=7,
        )
        table = run_sweep(config, parallelism=1)
        path = tmp_path / "small.csv"
        write_sweep_csv(table, path)
        assert path.read_bytes() == GOLDEN.read_bytes()

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            read_sweep_csv(path)


class TestRunJson:
    def test_round_trip(self, tmp_path):
        g = generate_complete(20)
        params = ModelParams(epsilon=1.0, gamma=0.0, max_iterations=300)
        res = run(g, InitSpec(), params, 5)
        path = tmp_path / "run.json"
        write_run_json(res, params, 5, path, topology="complete", init="uniform")
        doc = read_run_json(path)
        assert doc["format"] == 1
        assert doc["converged"] == res.converged
        assert doc["iterations_used"] == res.iterations_used
        assert doc["params"]["epsilon"] == 1.0
        assert doc["final_opinions"] == pytest.approx(res.final_opinions.tolist())
        assert doc["trace"][0][0] == 0

    def test_unknown_format_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"format": 99}')
        with pytest.raises(ValueError):
            read_run_json(path)


class TestCli:
    def test_generate_graph(self, tmp_path, capsys):
        out = tmp_path / "er.edges"
        code = cli_main(["--quiet", "generate-graph", "--topology", "er", "--n", "50",
                         "--p", "0.2", "--seed", "3", "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert out.read_text().startswith("# n=50")

    def test_generate_lfr_writes_sidecar(self, tmp_path):
        out = tmp_path / "lfr.edges"
        code = cli_main(["--quiet", "generate-graph", "--topology", "lfr", "--n", "250",
                         "--mu-lfr", "0.1", "--seed", "3", "--out", str(out)])
        assert code == 0
        assert (tmp_path / "lfr.edges.communities").exists()

    def test_run_json_artifact_reproducible(self, tmp_path):
        args = ["--quiet", "run", "--topology", "complete", "--n", "30",
                "--epsilon", "1.0", "--gamma", "0.0", "--seed", "7",
                "--max-iterations", "300"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert cli_main(args + ["--out", str(a)]) == 0
        assert cli_main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["converged"] is True
        assert doc["summary"]["C"] == pytest.approx(1.0, abs=0.05)

    def test_run_stdout_summary(self, capsys):
        code = cli_main(["--quiet", "run", "--topology", "complete", "--n", "20",
                         "--epsilon", "1.0", "--gamma", "0.0", "--seed", "1",
                         "--max-iterations", "200"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] is True

    def test_sweep_with_config(self, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(
            "topology:\n  kind: complete\n  n: 16\n"
            "epsilon_values: [1.0]\ngamma_values: [0.0]\n"
            "replicates: 2\nmax_iterations: 200\nmaster_seed: 7\n"
        )
        out = tmp_path / "sweep.csv"
        code = cli_main(["--quiet", "sweep", "--config", str(cfg), "--out", str(out),
                         "--workers", "1"])
        assert code == 0
        assert len(read_sweep_csv(out)) == 1

    def test_sweep_requires_exactly_one_source(self, tmp_path, capsys):
        out = str(tmp_path / "s.csv")
        assert cli_main(["--quiet", "sweep", "--out", out]) == 2
        assert cli_main(["--quiet", "sweep", "--preset", "fig1-ba", "--config", "x.yaml",
                         "--out", out]) == 2

    def test_sweep_bad_config_exit_1(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text("topology:\n  kind: complete\nwhatever: 3\n")
        code = cli_main(["--quiet", "sweep", "--config", str(cfg),
                         "--out", str(tmp_path / "s.csv")])
        assert code == 1
        assert "whatever" in capsys.readouterr().err

    def test_metrics_consensus_file(self, tmp_path, capsys):
        path = tmp_path / "ops.txt"
        path.write_text("\n".join(["0.5"] * 40) + "\n")
        assert cli_main(["--quiet", "metrics", "--opinions", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["C"] == 1.0
        assert doc["dispersion"] == 0.0

    def test_presets_listing(self, capsys):
        assert cli_main(["--quiet", "presets"]) == 0
        out = capsys.readouterr().out
        assert "fig1-complete" in out and "fig4-lfr-polarized" in out

    def test_unknown_subcommand_exit_2(self, capsys):
        assert cli_main(["frobnicate"]) == 2

    def test_unknown_flag_exit_2(self, capsys):
        assert cli_main(["presets", "--bogus"]) == 2

    def test_missing_opinions_file_exit_1(self, tmp_path, capsys):
        assert cli_main(["--quiet", "metrics", "--opinions", str(tmp_path / "nope.txt")]) == 1
