"""End-to-end CLI tests: exit codes, emitted files, determinism."""

import json
import xml.etree.ElementTree as ElementTree

import numpy as np
import pytest

from kiim import Mechanism, MechanismSpec, Method, Noise, PairedDataset, generate, \
    write_pair_text
from kiim.cli import main, parse_method, parse_methods


@pytest.fixture
def pair_file(tmp_path):
    ds = generate(MechanismSpec(Mechanism.ANM1, Noise.GAUSSIAN, n=80, seed=0))
    path = tmp_path / "pair.txt"
    write_pair_text(path, ds)
    return path


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_method_aliases():
    assert parse_method("KIIM") is Method.KIIM
    assert parse_method(" rw-kiim ") is Method.RW_KIIM
    assert parse_methods("kiim,anm,kiim") == (Method.KIIM, Method.ANM)


def test_infer_decides_forward(pair_file, capsys):
    assert main(["infer", str(pair_file)]) == 0
    payload = _json_output(capsys)
    assert payload["direction"] == "XtoY"
    assert payload["method"] == "KIIM"
    assert payload["n"] == 80
    assert len(payload["config_digest"]) == 64
    assert payload["score_xy"]["retained_count"] >= 1
    assert 0.0 < payload["score_xy"]["retained_energy_ratio"] <= 1.0


def test_infer_identical_columns_is_undecided(tmp_path, capsys):
    xs = np.linspace(0.0, 1.0, 30)
    path = tmp_path / "pair.txt"
    write_pair_text(path, PairedDataset(xs, xs))
    assert main(["infer", str(path)]) == 2
    assert _json_output(capsys)["direction"] == "Undecided"


def test_infer_baseline_score_has_no_rank_fields(pair_file, capsys):
    assert main(["infer", str(pair_file), "--method", "anm"]) == 0
    payload = _json_output(capsys)
    assert payload["method"] == "ANM"
    assert "retained_count" not in payload["score_xy"]


def test_infer_flag_changes_config_digest(pair_file, capsys):
    main(["infer", str(pair_file)])
    default_digest = _json_output(capsys)["config_digest"]
    main(["infer", str(pair_file), "--kernel-x", "rbf:2.0"])
    assert _json_output(capsys)["config_digest"] != default_digest


def test_infer_reads_config_file(pair_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("lambda = 0.5\n")
    main(["infer", str(pair_file), "--config", str(cfg)])
    from_file = _json_output(capsys)["config_digest"]
    main(["infer", str(pair_file), "--lambda", "0.5"])
    assert _json_output(capsys)["config_digest"] == from_file


@pytest.mark.parametrize("argv", [
    ["infer", "does-not-exist.txt"],
    ["infer", "{pair}", "--method", "wat"],
    ["infer", "{pair}", "--kernel-x", "wat"],
    ["infer", "{pair}", "--lambda", "-1"],
    ["infer", "{pair}", "--lambda", "abc"],
    ["unknown-command"],
    [],
])
def test_bad_input_exits_one(pair_file, argv, capsys):
    argv = [a.format(pair=pair_file) for a in argv]
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_infer_malformed_pair_file(tmp_path, capsys):
    path = tmp_path / "pair.txt"
    path.write_text("1.0 2.0\n3.0\n")
    assert main(["infer", str(path)]) == 1
    assert "2" in capsys.readouterr().err


def test_infer_bad_config_file_key(pair_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("no_such_key = 1\n")
    assert main(["infer", str(pair_file), "--config", str(cfg)]) == 1


def test_infer_numerical_failure_exits_three(tmp_path, capsys):
    # duplicated cause values make the ridge system singular once the
    # regularizer underflows to nothing
    xs = np.array([0.0, 0.0, 1.0, 2.0, 3.0, 4.0])
    ys = np.array([1.0, 2.0, 0.5, 1.5, 2.5, 3.0])
    path = tmp_path / "pair.txt"
    write_pair_text(path, PairedDataset(xs, ys))
    assert main(["infer", str(path), "--lambda", "1e-300"]) == 3
    assert "numerical" in capsys.readouterr().err


def _run_synthetic(out_dir, seed="3"):
    return main(["synthetic", "--cells", "ANM1:Gaussian", "--methods", "kiim,anm",
                 "--trials", "3", "--n", "40", "--seed", seed,
                 "--out-dir", str(out_dir)])


def test_synthetic_writes_reports(tmp_path, capsys):
    out = tmp_path / "runs"
    assert _run_synthetic(out) == 0
    stdout = capsys.readouterr().out
    assert "accuracy" in stdout
    csv_lines = (out / "synthetic.csv").read_text().splitlines()
    assert csv_lines[0] == "mechanism,noise,method,trials,correct,errors,accuracy,accuracy_std"
    assert len(csv_lines) == 3
    assert csv_lines[1].startswith("ANM1,Gaussian,KIIM,3,")
    body = json.loads((out / "synthetic.json").read_text())
    assert body["schema"] == 1
    assert body["config"]["lambda"] == "0.001"
    assert len(body["results"]) == 2
    assert "total_seconds" in body["timings"]


def test_synthetic_reruns_are_byte_stable(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _run_synthetic(first) == 0
    assert _run_synthetic(second) == 0
    assert (first / "synthetic.csv").read_bytes() == (second / "synthetic.csv").read_bytes()
    bodies = []
    for out in (first, second):
        body = json.loads((out / "synthetic.json").read_text())
        body.pop("timings")
        bodies.append(body)
    assert bodies[0] == bodies[1]


def test_synthetic_rejects_unknown_cell(tmp_path, capsys):
    assert main(["synthetic", "--cells", "FOO:Gaussian",
                 "--out-dir", str(tmp_path)]) == 1
    assert "cell" in capsys.readouterr().err


def test_ablation_writes_reports(tmp_path, capsys):
    out = tmp_path / "runs"
    code = main(["ablation", "--cells", "ANM1:Gaussian", "--d-max", "1",
                 "--trials", "2", "--n", "30", "--seed", "0", "--out-dir", str(out)])
    assert code == 0
    csv_lines = (out / "ablation.csv").read_text().splitlines()
    assert csv_lines[0] == "mechanism,noise,discarded_top,trials,correct,errors,accuracy"
    assert len(csv_lines) == 3  # d = 0 and d = 1
    body = json.loads((out / "ablation.json").read_text())
    assert body["d_max"] == 1
    assert [r["discarded_top"] for r in body["results"]] == [0, 1]
    ElementTree.parse(out / "ablation.svg")
    assert "best d=" in capsys.readouterr().out


def test_tcep_command_full_run(tcep_dir, tmp_path, capsys):
    out = tmp_path / "runs"
    code = main(["tcep", str(tcep_dir), "--methods", "igci-uniform",
                 "--subsample-limit", "200", "--jobs", "2", "--out-dir", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "loaded 108 pairs, excluded 10, evaluated 98" in stdout
    body = json.loads((out / "tcep_summary.json").read_text())
    assert (body["loaded"], body["excluded"], body["usable"]) == (108, 10, 98)
    assert len(body["exclusions"]) == 10
    (acc,) = body["accuracies"]
    assert acc["method"] == "IGCIUniform"
    assert acc["evaluated"] == 98
    assert acc["accuracy"] > 0.5
    csv_lines = (out / "tcep_pairs.csv").read_text().splitlines()
    assert csv_lines[0] == "pair_id,method,score_xy,score_yx,decision,correct"
    assert len(csv_lines) == 99
    ElementTree.parse(out / "tcep_accuracy.svg")


def test_tcep_missing_directory(tmp_path, capsys):
    assert main(["tcep", str(tmp_path / "absent"), "--out-dir", str(tmp_path)]) == 1


def test_theory_check_prints_statistics(capsys):
    assert main(["theory-check", "--draws", "5"]) == 0
    stdout = capsys.readouterr().out
    assert "5 sample sets" in stdout
    assert "5 draws" in stdout
    assert "tangent" in stdout
