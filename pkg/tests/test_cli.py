import json

import pytest

from hamclass.cli import main, parse_range, plateau_report, read_records_csv


@pytest.fixture
def not_file(tmp_path):
    p = tmp_path / "not.txt"
    p.write_text("01 YES\n10 YES\n00 NO\n11 NO\n")
    return p


@pytest.fixture
def edge_file(tmp_path):
    p = tmp_path / "edge.json"
    p.write_text(json.dumps({
        "vertices": [{"id": "a", "role": "data"}, {"id": "b", "role": "data"}],
        "edges": [{"vertices": ["a", "b"], "set": "Proj"}],
        "seed": 0,
    }))
    return p


def test_train_not_gate(tmp_path, not_file, edge_file, capsys):
    out = tmp_path / "run"
    rc = main(["train", "--graph", str(edge_file), "--data", str(not_file), "--set", "Proj",
               "--range", "0,1", "-R", "100", "--nT", "50", "--out", str(out)])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert [round(w["weight"], 2) for w in rep["weights"]] == [1.0, 0.0, 0.0, 1.0]
    assert rep["run_config"]["weight_range"] == [0.0, 1.0]
    assert "report written" in capsys.readouterr().out


def test_missing_dataset_exit_two(tmp_path, edge_file, capsys):
    missing = tmp_path / "nope.txt"
    assert main(["train", "--graph", str(edge_file), "--data", str(missing)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_missing_graph_exit_two(tmp_path, capsys):
    assert main(["train", "--graph", str(tmp_path / "g.json")]) == 2
    assert "g.json" in capsys.readouterr().err


def test_bad_range_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["train", "--preset", "edge", "--range", "1,0"])
    assert exc.value.code == 2
    assert parse_range("-1,1") == (-1.0, 1.0)


def test_qudit_pauli_qubit_count(tmp_path, capsys):
    rc = main(["train", "--preset", "edge", "--set", "Pauli", "--mode", "qudit", "--group", "all",
               "-R", "10", "--nT", "5", "--out", str(tmp_path)])
    assert rc == 0
    assert "training qubits: 7" in capsys.readouterr().out
    assert json.loads((tmp_path / "report.json").read_text())["layout"]["n_qubits"] == 7


def test_config_file_and_schedule_override(tmp_path, not_file):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "edge", "R": 20, "n_T": 10, "weight_range": [0, 1],
                               "schedule": {"driver": [[0, 1], [0.5, 1], [1, 0]]}}))
    assert main(["train", "--config", str(cfg), "--data", str(not_file), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["run_config"]["R"] == 20
    assert rep["run_config"]["schedule"]["driver"][1] == [0.5, 1.0]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert main(["train", "--config", str(bad)]) == 2


def test_color_refuses_per_term(capsys):
    assert main(["color", "--bits", "9", "--mode", "per-term"]) == 2
    assert "qudit" in capsys.readouterr().err


def _color(tmp_path, name):
    out = tmp_path / name
    assert main(["color", "--bits", "6", "-R", "30", "--nT", "30", "--out", str(out)]) == 0
    return out


def test_color_six_bit_outputs(tmp_path):
    out = _color(tmp_path, "c")
    config, rows = read_records_csv(out / "color6.csv")
    assert len(rows) == 64
    assert list(rows[0]) == ["bitstring", "hue", "energy_mean", "energy_std", "overlap_p", "label", "predicted"]
    assert config["mode"] == "qudit" and config["grouping"] == "all" and "graph_seed" in config
    blue = [float(r["energy_mean"]) for r in rows if r["label"] == "YES"]
    red = [float(r["energy_mean"]) for r in rows if r["label"] == "NO"]
    assert sum(blue) / len(blue) < sum(red) / len(red)
    for name in ("color6_energy_sorted.svg", "color6_hue_sorted.svg", "color6_overlap.svg"):
        assert (out / name).is_file()


def test_color_rerun_bit_identical(tmp_path):
    a = (_color(tmp_path, "same") / "color6.csv").read_bytes()
    b = (_color(tmp_path, "same") / "color6.csv").read_bytes()
    assert a == b


def test_sweep_single_cell_matches_color(tmp_path):
    out = _color(tmp_path, "c")
    metrics = json.loads((out / "color6_metrics.json").read_text())["metrics"]
    sw = tmp_path / "sw"
    assert main(["sweep", "--bits", "6", "--R-grid", "30", "--nT-grid", "30", "--out", str(sw)]) == 0
    _, rows = read_records_csv(sw / "sweep.csv")
    assert float(rows[0]["fidelity"]) == metrics["fidelity"]
    assert float(rows[0]["delta_e"]) == metrics["delta_e"]
    plateau = json.loads((sw / "plateau.json").read_text())
    assert plateau["cells"][0]["within"]


def test_plateau_report_reference_is_largest():
    rows = [{"R": 30, "n_T": 30, "fidelity": 80.0}, {"R": 150, "n_T": 150, "fidelity": 90.0},
            {"R": 5, "n_T": 5, "fidelity": 50.0}]
    rep = plateau_report(rows)
    assert rep["reference"]["R"] == 150
    assert [c["within"] for c in rep["cells"]] == [False, True, False]


def test_bench_interactions_small(tmp_path, capsys):
    rc = main(["bench-interactions", "--presets", "edge", "--sets", "Proj", "Heis", "--labelings", "2",
               "--method", "exact-lp", "--out", str(tmp_path)])
    assert rc == 0
    _, rows = read_records_csv(tmp_path / "bench_interactions.csv")
    assert [(r["set"], r["N"], r["opt"]) for r in rows] == [("Proj", "6", "5"), ("Heis", "5", "4")]


def test_oracle_subcommands(tmp_path, not_file):
    assert main(["oracle", "--preset", "edge", "--data", str(not_file), "--range", "0,1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "oracle.json").read_text())
    assert [w["weight"] for w in rep["weights"]] == [1.0, 0.0, 0.0, 1.0]
    (tmp_path / "report.json").write_text(json.dumps(rep))
    assert main(["oracle", "--report", str(tmp_path / "report.json"), "--data", str(not_file),
                 "--out", str(tmp_path / "o2")]) == 0
    scores = json.loads((tmp_path / "o2" / "oracle.json").read_text())
    assert scores["yes_mean"] == pytest.approx(1.0) and scores["no_mean"] == pytest.approx(0.0)


def test_classify_from_report(tmp_path, not_file):
    assert main(["train", "--preset", "edge", "--data", str(not_file), "--method", "exact-lp",
                 "--out", str(tmp_path)]) == 0
    assert main(["classify", "--report", str(tmp_path / "report.json"), "--data", str(not_file),
                 "-R", "30", "--nT", "10", "--out", str(tmp_path)]) == 0
    _, rows = read_records_csv(tmp_path / "classify.csv")
    assert [r["bitstring"] for r in rows] == ["01", "10", "00", "11"]
    assert all(r["label"] == r["predicted"] for r in rows)
