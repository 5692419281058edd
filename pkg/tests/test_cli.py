from __future__ import annotations

import json

import pytest

from torsion_units.chartab import DATA_DIR
from torsion_units.cli import main
from torsion_units.zassenhaus import report_from_json, report_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_bundled(capsys):
    code, out, _ = run(capsys, "validate", "--table", "HS")
    assert code == 0
    assert "orthogonality: ok (24 characters)" in out


def test_validate_paths(capsys):
    code, out, _ = run(capsys, "validate", "--table", str(DATA_DIR / "A5.json"),
                       "--brauer", str(DATA_DIR / "A5.mod2.json"))
    assert code == 0 and "A5 mod 2: ok" in out


def test_validate_perturbed_size(capsys, tmp_path):
    doc = json.loads((DATA_DIR / "HS.json").read_text(encoding="utf-8"))
    doc["classes"][3]["size"] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc), encoding="utf-8")
    code, out, err = run(capsys, "validate", "--table", str(bad))
    assert code == 2 and "class sizes sum" in err


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--table", str(tmp_path / "nope.json"))
    assert code == 1 and "error" in err


def test_check_order_5_prints_23_tuples(capsys):
    code, out, _ = run(capsys, "check", "--table", "HS", "--order", "5", "--selection", "paper",
                       "--jobs", "1")
    assert code == 0
    rows = [line for line in out.splitlines() if line.startswith("| ") and line[2].isdigit()]
    assert len(rows) == 23
    assert "| # | ν_5a | ν_5b | ν_5c |" in out


def test_check_order_77_excluded(capsys):
    code, out, _ = run(capsys, "check", "--table", "HS", "--order", "77", "--selection", "paper",
                       "--jobs", "1")
    assert code == 0 and "Order 77: excluded" in out


def test_check_non_divisor(capsys):
    code, out, _ = run(capsys, "check", "--table", "HS", "--order", "9")
    assert code == 0 and "not a divisor of exponent" in out


def test_check_budget_skip_exit_code(capsys):
    code, out, _ = run(capsys, "check", "--table", "HS", "--order", "22", "--selection", "paper",
                       "--budget-cases", "10", "--jobs", "1")
    assert code == 3 and "skipped" in out


def test_check_json_mode_keeps_stdout_clean(capsys):
    code, out, err = run(capsys, "check", "--table", "HS", "--order", "2", "--selection", "paper",
                         "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data[0]["status"] == "constrained" and len(data[0]["solutions"]) == 6


def test_paper_selection_must_cover_orders(capsys):
    code, _, err = run(capsys, "check", "--table", "HS", "--order", "4", "--selection", "paper")
    assert code == 2 and "no entry" in err


def test_selection_file(capsys, tmp_path):
    sel = tmp_path / "s.json"
    sel.write_text(json.dumps({"order": 2, "constraints": [{"char": "χ_2", "p": "*", "l": [0, 1]}]}),
                   encoding="utf-8")
    code, out, _ = run(capsys, "check", "--table", "HS", "--order", "2", "--selection", f"file:{sel}")
    assert code == 0 and "constrained" in out


def test_kimmerle_hs_paper(capsys):
    code, out, _ = run(capsys, "kimmerle", "--table", "HS", "--selection", "paper", "--jobs", "1")
    assert code == 0
    assert "KC confirmed: π(G) = π(V(ZG)) on {2,3,5,7,11}" in out


def test_kimmerle_a5_full(capsys):
    code, out, _ = run(capsys, "kimmerle", "--table", "A5")
    assert code == 0 and "KC confirmed" in out


def test_kimmerle_zero_budget(capsys):
    code, out, _ = run(capsys, "kimmerle", "--table", "A5", "--budget", "0")
    assert code == 4 and "inconclusive" in out


def test_kimmerle_json_round_trip(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, err = run(capsys, "kimmerle", "--table", "HS", "--selection", "paper",
                         "--format", "json", "--out", str(target), "--jobs", "1")
    assert code == 0 and out == ""
    raw = json.loads(target.read_text(encoding="utf-8"))
    assert report_to_json(report_from_json(raw)) == raw
    assert raw["kc_verdict"] is True


def test_usage_errors(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])
    code, _, err = run(capsys, "check", "--table", "HS")
    assert code == 2 and "--order" in err
