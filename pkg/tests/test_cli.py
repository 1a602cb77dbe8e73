import json

import pytest

from b0kit import families as fam
from b0kit.cli import EXIT_CONTRADICTION, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main
from b0kit.linalg import AbelianGroupInvariants
from b0kit.pcgroup import format_presentation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_b0_json_roundtrip(capsys):
    code, out, _ = run(capsys, "b0", "--family", "G1", "--prime", "5", "--format", "json")
    assert code == EXIT_OK
    d = json.loads(out)
    assert AbelianGroupInvariants.from_dict(d["b0"]) == AbelianGroupInvariants((5,))
    assert d["fingerprint"] == fam.build(fam.FamilySpec("G1", 5)).fingerprint
    assert d["order"] == 3125


def test_schur_json(capsys):
    code, out, _ = run(capsys, "schur", "--control", "Heis(3)", "--prime", "3", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert AbelianGroupInvariants.from_dict(d) == AbelianGroupInvariants((3, 3))


def test_verify_impostor(capsys):
    code, out, _ = run(capsys, "verify", "--family", "G28_IMPOSTOR", "--prime", "5", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["consistent"] is False and d["collapsed_order"] == 625 and d["matches_expectation"]


def test_verify_family(capsys):
    code, out, _ = run(capsys, "verify", "--family", "G243_28", "--prime", "3", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["consistent"] and d["center_order"] == 3 and d["five_generator_criterion"]["ok"]


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--family", "G3", "--prime", "5", "--n-gens", "f4,f5", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK
    assert (d["t"], d["h"], d["b0_lower_bound"]) == (5, 25, 5) and d["certified"]


def test_certify_bad_segment(capsys):
    code, _, err = run(capsys, "certify", "--family", "G1", "--prime", "5", "--n-gens", "f3,f5")
    assert code == EXIT_USAGE and "terminal segment" in err


def test_families_list(capsys):
    code, out, _ = run(capsys, "families", "list", "--prime", "5", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and len(d["members"]) == d["b0_family_count"] == 6
    code, out, _ = run(capsys, "families", "list", "--prime", "7", "--text")
    assert "pcgroup 5" in out


def test_file_input(tmp_path, capsys):
    path = tmp_path / "q8.pc"
    path.write_text(format_presentation(fam.generalized_quaternion(8)))
    code, out, _ = run(capsys, "b0", "--file", str(path), "--format", "json")
    assert code == EXIT_OK and json.loads(out)["b0"]["torsion"] == []
    bad = tmp_path / "bad.pc"
    bad.write_text("pcgroup 1\norder 1 1\n")
    assert run(capsys, "schur", "--file", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "schur", "--file", str(tmp_path / "missing.pc"))[0] == EXIT_USAGE


def test_output_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["certify", "--family", "G243_30", "--prime", "3", "--format", "json", "-o", str(p)]) == EXIT_OK
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("wall_time"), db.pop("wall_time")
    assert da == db


@pytest.mark.parametrize(
    "argv",
    [
        ["b0"],  # no group
        ["b0", "--family", "G1"],  # no prime
        ["b0", "--family", "G2", "--prime", "5", "--r", "9"],
        ["b0", "--family", "G1", "--prime", "5", "--control", "C3"],
        ["b0", "--control", "nope", "--prime", "3"],
        ["b0", "--family", "G1", "--prime", "5", "--threads", "0"],
        ["frobnicate"],
        ["reproduce", "--prime", "11"],
        ["families", "list"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_budget_refusal(capsys):
    code, _, err = run(capsys, "b0", "--family", "G1", "--prime", "5", "--strategy", "full", "--max-order", "1000")
    assert code == EXIT_USAGE and "conj" in err


def test_contradiction_exit_code(monkeypatch, capsys):
    from b0kit import cli

    monkeypatch.setattr(cli.fam, "expected_consistency", lambda spec: (False, 0))
    assert main(["verify", "--family", "G2", "--prime", "5"]) == EXIT_CONTRADICTION


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--max-order", "12", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["ok"] and all(g["agree"] for g in d["groups"])


def test_reproduce_prime_3(capsys):
    code, out, _ = run(capsys, "reproduce", "--prime", "3", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["ok"]
    names = {c["name"] for c in d["checks"]}
    assert {"structure", "certificates", "exact-b0", "degenerate-p3", "strategy-invariance"} <= names


def test_runconfig_validation():
    with pytest.raises(UsageError):
        RunConfig("b0", strategy="sideways").validate()
    RunConfig("b0", prime=5, family="G1").validate()
