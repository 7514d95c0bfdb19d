"""Command-line interface: exit codes, golden run, determinism."""

import json
from pathlib import Path

import pytest

from prodplan.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main

FIXTURES = Path(__file__).parent / "fixtures"


def test_validate_ok_fixture(capsys):
    assert main(["validate", str(FIXTURES / "bottleneck.json")]) == EXIT_OK
    assert "OK" in capsys.readouterr().out


def test_validate_cyclic_bom_exit_2(tmp_path, capsys):
    doc = json.loads((FIXTURES / "bottleneck.json").read_text())
    doc["bom_edges"].append({"parent": "board", "child": "router_a", "quantity_per": 1.0})
    for p in doc["products"]:
        if p["id"] == "board":
            p["kind"] = "intermediate"
            p["unit_production_cost"] = {"f1": 1.0}
    bad = tmp_path / "cyclic.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", str(bad)]) == EXIT_VALIDATION
    out = capsys.readouterr().out
    assert "bom_cycle" in out and "router_a" in out and "board" in out


def test_missing_file_exit_1(capsys):
    assert main(["validate", "/nonexistent/nowhere.json"]) == EXIT_IO


def test_run_matches_golden(tmp_path):
    out = tmp_path / "plan.json"
    assert main(["run", "--dataset", str(FIXTURES / "bottleneck.json"), "--out", str(out)]) == EXIT_OK
    got = json.loads(out.read_text())
    got.pop("id")
    got.pop("created_at")
    golden = json.loads((FIXTURES / "golden_plan.json").read_text())
    assert got == golden


def test_diff_plan_with_itself_is_all_zero(tmp_path, capsys):
    out = tmp_path / "plan.json"
    main(["run", "--dataset", str(FIXTURES / "bottleneck.json"), "--out", str(out)])
    rc = main(["diff", str(out), str(out), "--format", "table"])
    assert rc == EXIT_OK
    table = capsys.readouterr().out
    assert "true" in table  # unchanged flags
    assert "0.00" in table


def test_diff_json_levels(tmp_path, capsys):
    out = tmp_path / "plan.json"
    main(["run", "--dataset", str(FIXTURES / "bottleneck.json"), "--out", str(out)])
    rc = main(
        [
            "diff",
            str(out),
            str(out),
            "--dataset",
            str(FIXTURES / "bottleneck.json"),
            "--level",
            "detail",
            "--product",
            "router_a",
        ]
    )
    assert rc == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["detail_slice"]["product"] == "router_a"


def test_gen_is_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ["gen", "--products", "40", "--factories", "2", "--depth", "2", "--seed", "1"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_gen_output_validates(tmp_path, capsys):
    out = tmp_path / "ds.json"
    assert main(["gen", "--products", "30", "--seed", "3", "--out", str(out)]) == EXIT_OK
    assert main(["validate", str(out)]) == EXIT_OK


def test_gen_depth_one_is_single_level(tmp_path):
    out = tmp_path / "flat.json"
    assert main(["gen", "--products", "12", "--depth", "1", "--seed", "2", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["bom_edges"] == []
    assert {p["kind"] for p in doc["products"]} <= {"finished", "raw_material"}


def test_gen_rejects_bad_sizes():
    assert main(["gen", "--products", "0"]) == EXIT_VALIDATION


def test_run_with_custom_config(tmp_path):
    ds_path = FIXTURES / "bottleneck.json"
    doc = json.loads(ds_path.read_text())
    config = doc["default_config"]
    config["demand"]["router_a"] = [0] * 30
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "plan.json"
    rc = main(["run", "--dataset", str(ds_path), "--config", str(cfg_path), "--out", str(out)])
    assert rc == EXIT_OK
    plan_doc = json.loads(out.read_text())
    assert sum(plan_doc["production"]["router_a"]["f1"]) == 0


def test_serve_with_malformed_dataset_exits_validation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit) as err:
        main(["serve", "--dataset", str(bad)])
    assert err.value.code == EXIT_VALIDATION
