"""
BBShift CLI tests

Each subcommand is driven through ``main`` with files in a temporary
directory; exit codes, outputs and byte-level reproducibility are checked.
"""

import json

import numpy as np
import pytest
import yaml

from bbshift.cli import main
from bbshift.core import LabelSpace
from bbshift.io import load_dataset_csv, load_model, read_report, read_table, save_dataset_csv


@pytest.fixture()
def two_class_files(tmp_path):
    """Hard predictions whose weight estimate is exactly [0.5, 1.5]."""
    source = tmp_path / "source.csv"
    rows = ["0,0"] * 4 + ["1,0", "0,1"] + ["1,1"] * 4
    source.write_text("y_true,y_pred\n" + "\n".join(rows) + "\n", encoding="utf-8")
    target = tmp_path / "target.csv"
    target.write_text("y_pred\n" + "0\n" * 7 + "1\n" * 13, encoding="utf-8")
    return source, target


@pytest.fixture()
def mixture_files(tmp_path, mixture3):
    train = tmp_path / "train.csv"
    target = tmp_path / "target_x.csv"
    save_dataset_csv(train, mixture3([1 / 3, 1 / 3, 1 / 3], 300, seed=1))
    save_dataset_csv(target, mixture3([0.6, 0.2, 0.2], 200, seed=2))
    return train, target


def test_estimate_prints_weights(two_class_files, capsys):
    source, target = two_class_files
    code = main(["estimate", "--source", str(source), "--target", str(target), "--k", "2"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(report["weights"]["w"], [0.5, 1.5], atol=1e-12)
    assert report["weights"]["fallback"] is False
    assert report["meta"]["k"] == 2


def test_estimate_csv_report(two_class_files, tmp_path):
    source, target = two_class_files
    out = tmp_path / "weights.csv"
    args = ["estimate", "--source", str(source), "--target", str(target), "--k", "2"]
    assert main(args + ["--format", "csv", "--out", str(out), "--normalize"]) == 0
    report = read_report(out)
    np.testing.assert_allclose(report.weights.w, [0.5, 1.5], atol=1e-12)
    assert report.weights.mu_y_normalized is not None


def test_detect_exit_codes(two_class_files, tmp_path, capsys):
    source, _ = two_class_files
    copy = tmp_path / "copy.csv"
    copy.write_text(source.read_text(encoding="utf-8"), encoding="utf-8")
    assert main(["detect", "--source", str(source), "--target", str(copy), "--k", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["detection"]["p_value"] == pytest.approx(1.0)
    assert report["detection"]["reject"] is False

    ones = tmp_path / "ones.csv"
    ones.write_text("y_pred\n" + "1\n" * 30, encoding="utf-8")
    zeros = tmp_path / "zeros.csv"
    zeros.write_text("y_pred\n" + "0\n" * 30, encoding="utf-8")
    for method in ("ks", "chi2"):
        args = ["detect", "--source", str(zeros), "--target", str(ones), "--k", "2", "--method", method]
        assert main(args) == 3


def test_usage_and_data_errors(two_class_files, tmp_path, capsys):
    source, target = two_class_files
    base = ["estimate", "--source", str(source), "--target", str(target)]
    assert main(base + ["--k", "2", "--delta", "0.9"]) == 1
    assert main(base) == 1
    assert main(base + ["--k", "1"]) == 1
    assert main(["estimate", "--source", str(tmp_path / "missing.csv"), "--target", str(target), "--k", "2"]) == 2
    assert main(base + ["--k", "2", "--mode", "soft"]) == 2
    assert main(["estimate", "--source", str(target), "--target", str(target), "--k", "2"]) == 2
    assert main([]) == 1
    assert "Error" in capsys.readouterr().err


def test_version_exits_cleanly(capsys):
    assert main(["--version"]) == 0
    assert "bbshift" in capsys.readouterr().out


def test_correct_writes_models_and_report(mixture_files, tmp_path):
    train, target = mixture_files
    out = tmp_path / "corrected"
    args = ["correct", "--source", str(train), "--target", str(target), "--k", "3", "--iterations", "100", "--out", str(out)]
    assert main(args) == 0
    assert {p.name for p in out.iterdir()} == {"model.json", "baseline.json", "report.json"}

    model = load_model(out / "model.json")
    assert model.space == LabelSpace(3)
    report = read_report(out / "report.json")
    assert report.correction.reweighted
    assert report.correction.target_accuracy is not None
    assert len(report.weights.w) == 3


def test_correct_requires_out(mixture_files):
    train, target = mixture_files
    assert main(["correct", "--source", str(train), "--target", str(target), "--k", "3"]) == 1


def test_simulate_synthetic_and_resampled(tmp_path):
    out = tmp_path / "shifted.csv"
    args = ["simulate", "--k", "3", "--n", "60", "--shift", "tweak_one", "--shift-class", "1", "--rho", "0.8"]
    assert main(args + ["--out", str(out), "--seed", "4"]) == 0
    data = load_dataset_csv(out, LabelSpace(3))
    assert data.n == 60 and data.d == 3

    resampled = tmp_path / "knocked.csv"
    knockout = ["simulate", "--k", "3", "--n", "40", "--source", str(out), "--shift", "knockout"]
    assert main(knockout + ["--shift-class", "1", "--knockout-fraction", "1.0", "--out", str(resampled)]) == 0
    assert 1 not in load_dataset_csv(resampled, LabelSpace(3)).labels

    assert main(["simulate", "--k", "3", "--out", str(out)]) == 1
    assert main(["simulate", "--k", "3", "--shift", "knockout", "--knockout-fraction", "0.5", "--out", str(out)]) == 1


def test_simulate_json_writes_records(tmp_path):
    out = tmp_path / "sim.json"
    args = ["simulate", "--k", "3", "--n", "5", "--shift", "dirichlet", "--concentration", "1.0"]
    assert main(args + ["--format", "json", "--out", str(out), "--seed", "2"]) == 0
    records = json.loads(out.read_text(encoding="utf-8"))
    assert len(records) == 5
    assert all(set(record) == {"y_true", "x0", "x1", "x2"} for record in records)
    assert all(record["y_true"] in (0, 1, 2) for record in records)

    csv_out = tmp_path / "sim.csv"
    assert main(args + ["--format", "csv", "--out", str(csv_out), "--seed", "2"]) == 0
    data = load_dataset_csv(csv_out, LabelSpace(3))
    assert [record["y_true"] for record in records] == data.labels.tolist()
    np.testing.assert_array_equal([[r["x0"], r["x1"], r["x2"]] for r in records], data.features)


def test_experiment_from_config(tmp_path, capsys):
    config = tmp_path / "exp.yaml"
    config.write_text(yaml.safe_dump({
        "name": "cli",
        "kind": "estimation",
        "shifts": [{"kind": "dirichlet", "alpha": 1.0}],
        "sizes": [100],
        "replications": 2,
        "train": {"iterations": 30},
    }), encoding="utf-8")
    out = tmp_path / "table.json"
    assert main(["experiment", "--config", str(config), "--format", "json", "--out", str(out), "--seed", "3"]) == 0
    table = read_table(out)
    assert len(table) == 2
    assert set(table["seed"]) == {3}
    assert "mse_w" in capsys.readouterr().out

    assert main(["experiment", "--config", str(config), "--preset", "detection_power", "--out", str(out)]) == 1
    assert main(["experiment", "--preset", "unknown", "--out", str(out)]) == 1


def test_every_command_is_byte_reproducible(two_class_files, mixture_files, tmp_path):
    source, target = two_class_files
    train, target_x = mixture_files
    config = tmp_path / "exp.yaml"
    config.write_text(yaml.safe_dump({
        "kind": "correction",
        "shifts": [{"kind": "tweak_one", "class_index": 0, "rho": 0.6}],
        "sizes": [150],
        "replications": 2,
        "train": {"iterations": 30},
    }), encoding="utf-8")

    def run(tag):
        folder = tmp_path / tag
        folder.mkdir()
        pred_args = ["--source", str(source), "--target", str(target), "--k", "2"]
        main(["estimate", *pred_args, "--out", str(folder / "estimate.json")])
        main(["detect", *pred_args, "--out", str(folder / "detect.json")])
        main(["correct", "--source", str(train), "--target", str(target_x), "--k", "3",
              "--iterations", "50", "--seed", "5", "--out", str(folder / "correct")])
        main(["simulate", "--k", "3", "--n", "80", "--shift", "dirichlet", "--concentration", "0.5",
              "--seed", "5", "--out", str(folder / "simulate.csv")])
        main(["experiment", "--config", str(config), "--out", str(folder / "experiment.csv")])
        return {p.relative_to(folder): p.read_bytes() for p in sorted(folder.rglob("*")) if p.is_file()}

    first, second = run("a"), run("b")
    assert len(first) == 7
    assert first == second
