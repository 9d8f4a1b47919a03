import json

import pytest
from conftest import DATA, GOLDEN

from circloop import parse_economy
from circloop.cli import main
from circloop.documents import ALGORITHMS

ECONOMY = str(DATA / "fixture_economy.json")
PLAN = str(DATA / "fixture_plan.json")


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


def test_validate_ok():
    assert main(["validate", ECONOMY]) == 0


def test_validate_reports_every_diagnostic(tmp_path, capsys):
    doc = json.loads((DATA / "fixture_economy.json").read_text())
    doc["products"][3]["features"] = []
    doc["products"][5]["inputs"][0]["supplier"] = "B"
    assert main(["validate", write(tmp_path, "bad.json", doc)]) == 1
    err = capsys.readouterr().err.splitlines()
    assert "product G: empty feature set" in err
    assert any(line.startswith("level violation at product B") for line in err)


@pytest.mark.parametrize("payload", ["{oops", json.dumps({"schema_version": 3})])
def test_validate_parse_errors(tmp_path, payload):
    assert main(["validate", write(tmp_path, "bad.json", payload)]) == 2


def test_missing_file_is_a_parse_error(tmp_path):
    assert main(["validate", str(tmp_path / "absent.json")]) == 2


def test_plan_writes_result(tmp_path, capsys):
    out = tmp_path / "result.json"
    assert main(["plan", ECONOMY, PLAN, "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["score"] == 21.0
    assert result["feasible"] is True
    assert result["moves"] == [{"owner": "G", "slot": 0, "from": "S", "to": "RS"}]
    assert "score 21" in capsys.readouterr().out


def test_plan_with_audit(tmp_path):
    assert main(["plan", ECONOMY, PLAN, "--audit", "-o", str(tmp_path / "r.json")]) == 0


def test_plan_rejects_unknown_algorithm(tmp_path):
    plan = json.loads((DATA / "fixture_plan.json").read_text())
    plan["algorithm"] = "annealing"
    assert main(["plan", ECONOMY, write(tmp_path, "p.json", plan)]) == 2


def test_plan_rejects_unknown_product(tmp_path):
    plan = json.loads((DATA / "fixture_plan.json").read_text())
    plan["demand"] = [{"product": "Z", "units": 1}]
    assert main(["plan", ECONOMY, write(tmp_path, "p.json", plan)]) == 2


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_plan_matches_golden(tmp_path, algorithm):
    plan = json.loads((DATA / "fixture_plan.json").read_text())
    plan["algorithm"] = algorithm
    out = tmp_path / "r.json"
    assert main(["plan", ECONOMY, write(tmp_path, "p.json", plan), "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert isinstance(result.pop("wall_time"), float)
    golden = json.loads((GOLDEN / f"fixture_{algorithm}.json").read_text())
    golden.pop("wall_time")
    assert result == golden


def test_report_tables(tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["plan", ECONOMY, PLAN, "-o", str(out)])
    capsys.readouterr()
    assert main(["report", ECONOMY, str(out)]) == 0
    text = capsys.readouterr().out
    sections = text.split("\n\n")
    assert sections[0].splitlines()[0] == "# lca"
    assert "B,5,11,0,2,3" in sections[0].splitlines()
    assert "G,2,2,0,2,0" in sections[0].splitlines()
    bounds = sections[2].splitlines()
    assert bounds[0] == "# bounds"
    assert "climate,11,12,0" in bounds
    assert "time,5,,0" in bounds


def test_report_rejects_result_for_other_economy(tmp_path):
    out = tmp_path / "r.json"
    main(["plan", ECONOMY, PLAN, "-o", str(out)])
    doc = json.loads((DATA / "fixture_economy.json").read_text())
    doc["raw_materials"][2]["base_time"] = 9
    assert main(["report", write(tmp_path, "e.json", doc), str(out)]) == 2


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--seed", "5", "-o", str(a)]) == 0
    assert main(["gen", "--seed", "5", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "--seed", "6"]) == 0
    assert capsys.readouterr().out != a.read_text()


def test_gen_rejects_impossible_shapes():
    assert main(["gen", "--seed", "1", "--materials", "0"]) == 2


def test_generated_economies_validate(tmp_path):
    for seed in range(1, 101):
        out = tmp_path / f"g{seed}.json"
        assert main(["gen", "--seed", str(seed), "--byproduct-rate", "0.3", "-o", str(out)]) == 0
        assert main(["validate", str(out)]) == 0


def test_singleton_classes_leave_nothing_to_choose(tmp_path):
    econ = tmp_path / "e.json"
    main(["gen", "--seed", "3", "--class-size", "1", "-o", str(econ)])
    doc = json.loads(econ.read_text())
    top = max(p["level"] for p in doc["products"])
    plan = {"demand": [{"product": p["name"], "units": 1} for p in doc["products"] if p["level"] == top],
            "algorithm": "exhaustive"}
    out = tmp_path / "r.json"
    assert main(["plan", str(econ), write(tmp_path, "p.json", plan), "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["nodes"] == 1
    assert result["moves"] == []
    assert parse_economy(doc).n_products == len(doc["products"])
