"""Experiment specs, the run pipeline, trace/summary/model files, plots, and the CLI."""

import csv
import os

import numpy as np
import pytest

from spglab.cli import main
from spglab.datasets import synth_classification
from spglab.experiments import (
    CSV_COLUMNS,
    ExperimentResult,
    SpecError,
    build_problem,
    emit_spec,
    entry_name,
    entry_to_config,
    evals_to_threshold,
    evaluate_quantized,
    parse_spec,
    read_model_file,
    read_trace_csv,
    run_experiment,
    write_models_csv,
    write_summary,
    write_trace_csv,
)
from spglab.plotting import render_plot
from spglab.selftest import SuiteReport, SuiteRow

BASE = """
name: demo
dataset: {kind: synth_classification, n: 60, d: 8, row_nnz: 3, noise: 0.2, seed: 1}
loss: {kind: nlls}
regularizer: {kind: l0, lam: 1.0e-4}
solvers:
  - {algorithm: pgd, T: 12}
  - {algorithm: mb_spg, T: 12, m: 6, residual_every: 4}
seeds: [0, 1]
"""


def write_spec(tmp_path, text=BASE, name="spec.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSpecParsing:
    def test_defaults_fill_in(self):
        spec = parse_spec(BASE)
        assert spec.name == "demo"
        assert spec.outputs == {
            "csv": "demo_traces.csv",
            "svg": "demo_curves.svg",
            "summary": "demo_summary.txt",
            "models": None,
        }
        assert spec.regularizer["lam"] == 1e-4
        assert spec.n_probe == 4096

    def test_round_trip(self):
        spec = parse_spec(BASE)
        assert parse_spec(emit_spec(spec)) == spec

    def test_explicit_null_output_survives(self):
        spec = parse_spec(BASE + "outputs: {svg: null}\n")
        assert spec.outputs["svg"] is None
        again = parse_spec(emit_spec(spec))
        assert again.outputs["svg"] is None

    def test_unknown_keys_report_path(self):
        with pytest.raises(SpecError, match=r"dataset.*\['rows'\]"):
            parse_spec(BASE.replace("n: 60", "rows: 60"))
        with pytest.raises(SpecError, match=r"solvers\[0\].*momentum"):
            parse_spec(BASE.replace("algorithm: pgd, T: 12", "algorithm: pgd, T: 12, momentum: 0.9"))

    def test_entry_names_must_be_unique(self):
        text = BASE.replace("algorithm: mb_spg, T: 12, m: 6, residual_every: 4", "algorithm: pgd, T: 9")
        with pytest.raises(SpecError, match="collide"):
            parse_spec(text)

    def test_duplicate_seeds_rejected(self):
        with pytest.raises(SpecError, match="duplicate"):
            parse_spec(BASE.replace("seeds: [0, 1]", "seeds: [0, 0]"))

    def test_nlls_needs_classification_labels(self):
        text = BASE.replace("synth_classification", "synth_regression")
        with pytest.raises(SpecError, match="nlls"):
            parse_spec(text)

    def test_quant_lam_defaults_to_one(self):
        text = BASE.replace("{kind: l0, lam: 1.0e-4}", "{kind: quant}")
        spec = parse_spec(text)
        assert spec.regularizer["lam"] == 1.0
        assert spec.regularizer["grid"] == [-1.0, 1.0]

    def test_batch_keys_are_exclusive(self):
        bad = BASE.replace("m: 6,", "m: 6, b: 2,")
        with pytest.raises(SpecError):
            parse_spec(bad)

    def test_horizon_or_accuracy_required(self):
        with pytest.raises(SpecError):
            parse_spec(BASE.replace("algorithm: pgd, T: 12", "algorithm: pgd"))


class TestEntryToConfig:
    def test_batch_key_picks_schedule(self):
        spec = parse_spec(BASE)
        cfg = entry_to_config(spec.solvers[1], seed=3, n=60)
        assert cfg.schedule.kind == "fixed" and cfg.schedule.m == 6
        assert cfg.seed == 3
        assert cfg.residual_every == 4

    def test_online_anchor_key(self):
        text = BASE + "    \n"
        spec = parse_spec(
            text.replace(
                "  - {algorithm: mb_spg, T: 12, m: 6, residual_every: 4}",
                "  - {algorithm: spgr, T: 12, s1: 40, setting: online}",
            )
        )
        cfg = entry_to_config(spec.solvers[1], seed=0, n=60)
        assert cfg.schedule.kind == "recursive_online" and cfg.schedule.s1 == 40

    def test_s1_requires_online(self):
        text = BASE.replace(
            "  - {algorithm: mb_spg, T: 12, m: 6, residual_every: 4}",
            "  - {algorithm: spgr, T: 12, s1: 40}",
        )
        with pytest.raises(SpecError, match="online"):
            parse_spec(text)

    def test_entry_names_carry_setting(self):
        assert entry_name({"algorithm": "spgr", "setting": "online"}) == "spgr-online"
        assert entry_name({"algorithm": "spgr"}) == "spgr-finite_sum"
        assert entry_name({"algorithm": "pgd"}) == "pgd"
        assert entry_name({"algorithm": "pgd", "name": "mine"}) == "mine"


class TestRunPipeline:
    def test_run_ids_in_planned_order(self):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        assert result.run_ids == ["pgd-s0", "pgd-s1", "mb_spg-s0", "mb_spg-s1"]
        assert not result.any_diverged

    def test_parallel_equals_serial(self, tmp_path):
        spec = parse_spec(BASE)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trace_csv(run_experiment(spec, jobs=1), str(a))
        write_trace_csv(run_experiment(spec, jobs=2), str(b))
        strip = lambda p: [
            [v for k, v in zip(CSV_COLUMNS, row) if k != "wall_ms"]
            for row in csv.reader(p.open())
        ]
        assert strip(a) == strip(b)

    def test_seed_override(self):
        spec = parse_spec(BASE)
        result = run_experiment(spec, seeds=[7])
        assert result.run_ids == ["pgd-s7", "mb_spg-s7"]

    def test_pgd_evals_column_is_full_passes(self):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        tr = result.traces["pgd-s0"]
        assert [r.grad_evals for r in tr.records] == [60 * (t + 1) for t in range(12)]


class TestTraceFiles:
    def test_csv_round_trip(self, tmp_path):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        path = tmp_path / "traces.csv"
        write_trace_csv(result, str(path))
        rows = read_trace_csv(str(path))
        assert sorted(set(r["run_id"] for r in rows)) == sorted(result.run_ids)
        got = [r for r in rows if r["run_id"] == "pgd-s0"]
        want = result.traces["pgd-s0"].records
        assert len(got) == len(want)
        assert [r["F"] for r in got] == [rec.F for rec in want]
        assert all(r["algorithm"] == "pgd" for r in got)

    def test_read_rejects_wrong_header(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SpecError, match="header"):
            read_trace_csv(str(bad))
        empty = tmp_path / "empty.csv"
        empty.write_text(",".join(CSV_COLUMNS) + "\n")
        with pytest.raises(SpecError, match="no data rows"):
            read_trace_csv(str(empty))

    def test_summary_lines(self, tmp_path):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        text = write_summary(result, str(tmp_path / "summary.txt"))
        assert "pgd" in text and "mb_spg" in text
        assert "1e-01" in text or "0.1" in text

    def test_evals_to_threshold(self):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        tr = result.traces["pgd-s0"]
        measured = [r for r in tr.records if r.residual is not None]
        loose = max(r.residual for r in measured)
        assert evals_to_threshold(tr, loose) == min(
            r.grad_evals for r in measured if r.residual <= loose
        )
        assert evals_to_threshold(tr, 0.0) == np.inf

    def test_models_round_trip(self, tmp_path):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        path = tmp_path / "models.csv"
        write_models_csv(result, str(path))
        loaded = dict(read_model_file(str(path)))
        assert sorted(loaded) == sorted(result.run_ids)
        assert np.array_equal(loaded["pgd-s1"], result.traces["pgd-s1"].x_final)

    def test_plain_vector_model_file(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("0.5\n-1.5\n0.0\n")
        [(label, x)] = read_model_file(str(path))
        assert np.array_equal(x, [0.5, -1.5, 0.0])


def test_evaluate_quantized_counts():
    data = synth_classification(40, 6, row_nnz=3, noise=0.0, seed=2, planted_nnz=6)
    rep = evaluate_quantized(data.planted.astype(float), (-1.0, 1.0), data)
    assert rep["accuracy"] == 1.0
    assert rep["tp"] + rep["tn"] == 40 and rep["fp"] == rep["fn"] == 0
    flipped = evaluate_quantized(-data.planted, (-1.0, 1.0), data)
    assert flipped["accuracy"] == 0.0
    with pytest.raises(SpecError):
        evaluate_quantized(np.ones(3), (-1.0, 1.0), data)


class TestPlot:
    def make_csv(self, tmp_path):
        spec = parse_spec(BASE)
        result = run_experiment(spec)
        path = tmp_path / "demo_traces.csv"
        write_trace_csv(result, str(path))
        return path

    def test_svg_structure(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        out = tmp_path / "fig.svg"
        info = render_plot(str(csv_path), str(out))
        assert info["groups"] == 2
        body = out.read_text()
        assert ">pgd<" in body and ">mb_spg<" in body
        assert "stroke-dasharray" in body  # pgd renders dashed

    def test_svg_bytes_deterministic(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render_plot(str(csv_path), str(a))
        render_plot(str(csv_path), str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_floor_clamp_footnote(self, tmp_path):
        path = tmp_path / "zero.csv"
        with path.open("w") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            w.writerow(["run-s0", "pgd", 0, 0, 60, 0.0, "", 3, 1.0])
            w.writerow(["run-s0", "pgd", 0, 1, 120, 1e-30, "", 3, 1.0])
        out = tmp_path / "zero.svg"
        info = render_plot(str(path), str(out), log_y=True)
        assert info["clamped"]
        assert "clamped" in out.read_text()

    def test_residual_axis_skips_unmeasured(self, tmp_path):
        csv_path = self.make_csv(tmp_path)
        out = tmp_path / "res.svg"
        info = render_plot(str(csv_path), str(out), y_axis="exact_residual")
        assert info["groups"] == 2


class TestCLI:
    def test_run_success_and_artifacts(self, tmp_path, capsys):
        spec_path = write_spec(tmp_path)
        rc = main(["run", spec_path, "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "demo_traces.csv").exists()
        assert (tmp_path / "demo_summary.txt").exists()
        assert (tmp_path / "demo_curves.svg").exists()
        out = capsys.readouterr().out
        assert "traces:" in out

    def test_run_respects_out_env(self, tmp_path, monkeypatch, capsys):
        spec_path = write_spec(tmp_path)
        target = tmp_path / "nested"
        monkeypatch.setenv("SPGLAB_OUT", str(target))
        assert main(["run", spec_path]) == 0
        assert (target / "demo_traces.csv").exists()

    def test_run_seed_flag_overrides(self, tmp_path):
        spec_path = write_spec(tmp_path)
        assert main(["run", spec_path, "--out", str(tmp_path), "--seed", "5"]) == 0
        rows = read_trace_csv(str(tmp_path / "demo_traces.csv"))
        assert set(r["run_id"] for r in rows) == {"pgd-s5", "mb_spg-s5"}

    def test_validation_failure_is_exit_1(self, tmp_path, capsys):
        bad = write_spec(tmp_path, BASE.replace("kind: nlls", "kind: huber"), "bad.yaml")
        assert main(["run", bad]) == 1
        assert "loss.kind" in capsys.readouterr().err

    def test_missing_file_is_exit_1(self, capsys):
        assert main(["run", "no_such_spec.yaml"]) == 1

    def test_divergence_is_exit_2(self, tmp_path):
        text = """
name: blowup
dataset: {kind: synth_classification, n: 30, d: 5, row_nnz: 3, noise: 0.1, seed: 0}
loss: {kind: nlls}
regularizer: {kind: quant}
solvers:
  - {algorithm: heuristic_qsgd, T: 40, m: 4, eta: 1.0e+12}
seeds: [0]
outputs: {svg: null}
"""
        spec_path = write_spec(tmp_path, text, "blowup.yaml")
        rc = main(["run", spec_path, "--out", str(tmp_path)])
        assert rc == 2
        assert (tmp_path / "blowup_traces.csv").exists()
        assert "DIVERGED" in (tmp_path / "blowup_summary.txt").read_text()

    def test_selftests_pass_quickly(self, capsys):
        assert main(["selftest-prox", "--cases", "40"]) == 0
        assert main(["selftest-grad", "--cases", "10"]) == 0
        out = capsys.readouterr().out
        assert "ok" in out or "pass" in out.lower()

    def test_selftest_failure_is_exit_3(self, monkeypatch, capsys):
        import spglab.selftest as st

        broken = SuiteReport(
            suite="prox",
            rows=[SuiteRow(name="l0", cases=5, worst=1.0, tol=1e-8, passed=False)],
        )
        monkeypatch.setattr(st, "prox_selftest", lambda **kw: broken)
        assert main(["selftest-prox"]) == 3

    def test_plot_command(self, tmp_path):
        spec_path = write_spec(tmp_path)
        assert main(["run", spec_path, "--out", str(tmp_path)]) == 0
        rc = main(
            ["plot", str(tmp_path / "demo_traces.csv"), "--y", "exact_residual",
             "--target", "r.svg", "--out", str(tmp_path)]
        )
        assert rc == 0
        assert (tmp_path / "r.svg").exists()

    def test_plot_rejects_missing_csv(self, capsys):
        assert main(["plot", "missing.csv"]) == 1

    def test_eval_quant_command(self, tmp_path, capsys):
        from spglab.datasets import emit_libsvm

        data = synth_classification(30, 5, row_nnz=3, noise=0.0, seed=4, planted_nnz=5)
        data_path = tmp_path / "eval.libsvm"
        data_path.write_text(emit_libsvm(data))
        model_path = tmp_path / "model.txt"
        model_path.write_text("".join(f"{v}\n" for v in data.planted))
        rc = main(
            ["eval-quant", str(model_path), "--data", str(data_path), "--d", "5",
             "--grid", "-1", "1"]
        )
        assert rc == 0
        assert "accuracy 1.0000" in capsys.readouterr().out
