import json

import pytest

from cfforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--example", "fgsw", "--depth", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == "cf-forge/1"
    assert payload["report"]["ok"] is True


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "no-such-verb")[0] == 1
    assert run(capsys, "example", "show")[0] == 1
    code, _, err = run(capsys, "factor-sum", "--example", "fgsw",
                       "--subgroup", "weird:3")
    assert code == 1 and "usage error" in err


def test_validation_failure_exits_2(capsys):
    # 99 is not a legal f at level 1 (F_1 = [0, 6))
    code, _, err = run(capsys, "act", "--example", "fgsw", "--g", "1",
                       "--level", "1", "--f", "99", "--tail", "0")
    assert code == 2 and "validation failure" in err


def test_resource_cap_exits_3(capsys):
    code, _, err = run(capsys, "act", "--example", "fgsw", "--g", "3",
                       "--tail", "5;22")
    assert code == 3 and "resource cap" in err


def test_act_roundtrip(capsys):
    code, out, _ = run(capsys, "act", "--example", "fgsw", "--g", "1",
                       "--tail", "5;0;64")
    assert code == 0
    payload = json.loads(out)
    assert payload["out"] == {"level": 2, "f": 6, "tail": [64]}


def test_measure_emits_exact_totals(capsys):
    code, out, _ = run(capsys, "measure", "--example", "fgsw", "--depth", "4")
    assert code == 0
    assert json.loads(out)["totals"] == ["1/1", "3/2", "7/4", "15/8", "31/16"]


def test_output_is_deterministic(capsys):
    a = run(capsys, "haar", "--example", "fgsw", "--depth", "6")
    b = run(capsys, "haar", "--example", "fgsw", "--depth", "6")
    assert a == b and a[0] == 0


def test_json_and_svg_file_sinks(capsys, tmp_path):
    sink = tmp_path / "out.json"
    svg = tmp_path / "stack.svg"
    code, out, _ = run(capsys, "stack", "--example", "fgsw", "-N", "2",
                       "--json", str(sink), "--svg", str(svg))
    assert code == 0 and out == ""
    payload = json.loads(sink.read_text())
    assert payload["stages"][1]["total"] == "3/2"
    assert svg.read_text().startswith("<svg")


def test_example_list_and_show(capsys):
    code, out, _ = run(capsys, "example", "list")
    assert code == 0
    entries = json.loads(out)["entries"]
    assert "fgsw" in entries and entries["fgsw"]["kind"] == "params"
    code, out, _ = run(capsys, "example", "show", "fgsw")
    assert code == 0
    assert json.loads(out)["C"]["1"] == [0, 1, 4, 5]


def test_factor_scan_verbs(capsys):
    code, out, _ = run(capsys, "factor-scan", "--example", "fgsw",
                       "--subgroup", "mod:2", "--depth", "10")
    assert code == 0
    assert json.loads(out)["report"]["passes"] is True
    code, out, _ = run(capsys, "total-ergodicity", "--example", "fgsw",
                       "--moduli", "3,5", "--depth", "10")
    assert code == 0
    assert json.loads(out)["all_refuted"] is True


def test_odometer_verbs(capsys):
    code, out, _ = run(capsys, "odometer", "cover", "--chain",
                       "z-product-odometer", "--depth", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["copy_sizes"] == [2, 3, 2, 3][:len(payload["copy_sizes"])]
    code, out, _ = run(capsys, "odometer", "compat", "--chain",
                       "heisenberg-2adic-chain", "--example",
                       "heisenberg-rank-one", "--shift", "1", "--depth", "6")
    assert code == 0
    payload = json.loads(out)
    assert all(t == "0/1" for t in payload["terms"])
