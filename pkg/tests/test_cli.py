import csv
import io
import json

import pytest

from quadra.cli import main
from quadra.pbf import Pbf
from quadra.sweep import SWEEP_COLUMNS, SweepConfig, run_sweep, strip_timing, to_csv


@pytest.fixture
def f1_file(tmp_path, f1):
    path = tmp_path / "f1.json"
    path.write_text(f1.to_json())
    return path


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.json"
    assert main(["generate", "-N", "3", "-M", "2", "--seed", "7", "--out", str(path)]) == 0
    return path


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestGenerate:
    def test_instance(self, instance_file):
        data = json.loads(instance_file.read_text())
        assert data["num_vars"] == 6 and data["seed"] == 7

    def test_single(self, capsys):
        code, data = run_json(capsys, ["generate", "-N", "1", "-M", "1"])
        assert code == 0 and data["num_vars"] == 1

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["generate", "-N", "4", "-M", "3", "--seed", "2", "--out", str(a)])
        main(["generate", "-N", "4", "-M", "3", "--seed", "2", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable(self, tmp_path):
        assert main(["generate", "-N", "2", "-M", "2", "--out", str(tmp_path / "no" / "x.json")]) == 1


class TestReduce:
    @pytest.mark.parametrize("strategy", ["sparse", "medium", "dense"])
    def test_worked_example(self, capsys, f1_file, strategy):
        code, data = run_json(capsys, ["reduce", str(f1_file), "--strategy", strategy])
        assert code == 0 and len(data["steps"]) == 2
        assert data["elapsed_ms"] >= 0

    def test_quadratic_warns(self, capsys, tmp_path, caplog):
        path = tmp_path / "q.json"
        path.write_text(Pbf.from_dict({"num_vars": 2, "terms": [{"vars": [0, 1], "coeff": 1}]}).to_json())
        code, data = run_json(capsys, ["reduce", str(path)])
        assert code == 0 and data["steps"] == []
        assert "nothing to reduce" in caplog.text

    def test_sparse_vs_dense(self, capsys, tmp_path):
        inst = tmp_path / "i.json"
        main(["generate", "-N", "4", "-M", "3", "--out", str(inst)])
        capsys.readouterr()
        _, sparse = run_json(capsys, ["reduce", str(inst), "--strategy", "sparse"])
        _, dense = run_json(capsys, ["reduce", str(inst), "--strategy", "dense"])
        assert sparse["introduced_vars"] >= dense["introduced_vars"]

    def test_bad_input(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"hello": 1}')
        assert main(["reduce", str(bad)]) == 1
        assert main(["reduce", str(tmp_path / "missing.json")]) == 1


class TestAnalyze:
    def test_json(self, capsys, f1_file):
        code, data = run_json(capsys, ["analyze", str(f1_file)])
        assert code == 0 and data["degree"] == 4
        assert data["graph_stats"]["max_multiplicity"] == 4 and data["has_multi_edges"]

    def test_dot(self, capsys, f1_file):
        assert main(["analyze", str(f1_file), "--format", "dot"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("graph G {") and out.count("v0 -- v1;") == 4


class TestCircuit:
    def test_md_equals_rmd_on_quadratic(self, capsys, tmp_path):
        path = tmp_path / "q.json"
        path.write_text(json.dumps({"num_vars": 3, "terms": [
            {"vars": [0, 1], "coeff": 2.0}, {"vars": [1, 2], "coeff": -1.0}, {"vars": [0], "coeff": 1.0}]}))
        _, md = run_json(capsys, ["circuit", str(path), "--path", "md", "--format", "json"])
        _, rmd = run_json(capsys, ["circuit", str(path), "--path", "rmd", "--format", "json"])
        keys = ["total_gates", "single_qubit_gates", "two_qubit_gates", "depth", "num_qubits"]
        assert [md[k] for k in keys] == [rmd[k] for k in keys]

    def test_rmd_csv_row(self, capsys, instance_file):
        assert main(["circuit", str(instance_file), "--path", "rmd", "--strategy", "dense", "--format", "csv"]) == 0
        (row,) = rows_of(capsys.readouterr().out)
        assert int(row["qubits"]) == 6 + int(row["introduced_vars"])
        assert row["strategy"] == "dense"

    def test_md_no_higher_order(self, capsys, instance_file, tmp_path):
        metrics = tmp_path / "m.json"
        assert main(["circuit", str(instance_file), "--path", "md", "--metrics-out", str(metrics)]) == 0
        text = capsys.readouterr().out
        assert text.startswith("qubits 6\n") and "rzk" not in text
        assert json.loads(metrics.read_text())["higher_order_gates"] == 0


class TestVerify:
    def test_worked_example_passes(self, capsys, f1_file):
        code, report = run_json(capsys, ["verify", str(f1_file), "--gamma", "0.3"])
        assert code == 0 and report["passed"]
        names = {c["name"] for c in report["checks"]}
        assert {"md_phase", "dense_quadratisation", "sparse_rmd_phase"} <= names

    def test_tampered_trace_fails(self, capsys, tmp_path, f1_file):
        trace = tmp_path / "trace.json"
        main(["reduce", str(f1_file), "--out", str(trace)])
        data = json.loads(trace.read_text())
        data["penalty_weight"] = 0
        trace.write_text(json.dumps(data))
        code, report = run_json(capsys, ["verify", str(f1_file), "--trace", str(trace)])
        assert code == 1 and not report["passed"]
        quad = next(c for c in report["checks"] if c["name"] == "trace_quadratisation")
        assert not quad["passed"] and len(quad["counterexample"]) == 4

    def test_untampered_trace_passes(self, capsys, tmp_path, f1_file):
        trace = tmp_path / "trace.json"
        main(["reduce", str(f1_file), "--strategy", "sparse", "--out", str(trace)])
        code, report = run_json(capsys, ["verify", str(f1_file), "--trace", str(trace)])
        assert code == 0 and report["passed"]

    def test_instance(self, capsys, instance_file):
        code, report = run_json(capsys, ["verify", str(instance_file), "--strategy", "dense"])
        assert code == 0 and report["passed"]


class TestSweep:
    def test_header_and_md_rows(self, capsys):
        assert main(["sweep", "--sizes", "3x2", "--repeats", "1"]) == 0
        text = capsys.readouterr().out
        assert text.splitlines()[0] == ",".join(SWEEP_COLUMNS)
        assert text.splitlines()[0] == (
            "n,path,strategy,seed,qubits_after,introduced_vars,reduce_ms,d1,d2,single_q,two_q,total_gates,depth"
        )
        md = [r for r in rows_of(text) if r["path"] == "md"]
        assert len(md) == 1 and md[0]["strategy"] == "" and md[0]["qubits_after"] == md[0]["n"]

    def test_d2_at_largest_two_machine_size(self):
        rows = run_sweep(SweepConfig(sizes=[(2, 2), (3, 2), (4, 2), (5, 2)], repeats=1))
        d2 = {r["strategy"]: float(r["d2"]) for r in rows if r["n"] == "10" and r["path"] == "rmd"}
        # with two machines Medium and Dense pick identical pairs
        assert d2["dense"] == pytest.approx(0.322849213691)
        assert d2["medium"] == pytest.approx(0.322849213691)
        assert d2["sparse"] == pytest.approx(0.10861423221)
        assert d2["dense"] >= d2["medium"] > d2["sparse"]

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["sweep", "--sizes", "3x2,4x2,6", "--seeds", "0,1", "--repeats", "1", "--out", str(out)]) == 0
        assert strip_timing(a.read_text()) == strip_timing(b.read_text())

    def test_parallel_matches_serial(self):
        cfg = SweepConfig(sizes=[(3, 2), (4, 2)], seeds=[0, 1], repeats=1)
        assert strip_timing(to_csv(run_sweep(cfg, workers=2))) == strip_timing(to_csv(run_sweep(cfg, workers=1)))

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sizes": ["3x2", 5], "strategies": ["dense"], "seeds": [3], "repeats": 1}))
        assert main(["sweep", "--config", str(cfg)]) == 0
        rows = rows_of(capsys.readouterr().out)
        assert [(r["n"], r["path"]) for r in rows] == [("5", "md"), ("5", "rmd"), ("6", "md"), ("6", "rmd")]

    def test_empty_config_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"sizes": []}))
        assert main(["sweep", "--config", str(cfg)]) == 1

    def test_bench(self, capsys):
        assert main(["bench", "--sizes", "3x2", "--strategies", "sparse", "--repeats", "2"]) == 0
        (row,) = rows_of(capsys.readouterr().out)
        assert row["introduced_vars"] == "16" and float(row["reduce_ms"]) >= 0
