"""CLI: JSON output, exit codes, determinism."""

import json

import pytest

from jetideals.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_mul_truncates_to_zero(capsys):
    code, doc = run(capsys, "mul", "--m", "3", "--n", "1", "x^3", "x")
    assert code == 0 and doc == {"result": "0"}


def test_order_and_lowpart(capsys):
    code, doc = run(capsys, "order", "--m", "3", "--n", "2", "x*y + y^3")
    assert code == 0 and doc["order"] == 2
    code, doc = run(capsys, "lowpart", "--m", "3", "--n", "2", "x*y + y^3")
    assert code == 0 and doc["lowest_part"] == "x*y"


def test_order_of_zero_jet(capsys):
    code, doc = run(capsys, "order", "--m", "2", "--n", "1", "0")
    assert code == 0 and doc["order"] == "more than 2"


def test_allow_exact_set(capsys):
    code, doc = run(capsys, "allow", "--m", "2", "--n", "3",
                    "--gens", "x^2;y^2-x*z")
    assert code == 0 and doc["exact"]
    assert sorted(map(tuple, doc["directions"])) == [
        (0.0, 0.0, -1.0), (0.0, 0.0, 1.0)]


def test_member_exit_codes(capsys):
    code, doc = run(capsys, "member", "--m", "2", "--n", "1",
                    "--gens", "x", "x^2")
    assert code == 0 and doc["member"]
    code, doc = run(capsys, "member", "--m", "2", "--n", "3",
                    "--gens", "x^2;y^2-x*z", "x*y")
    assert code == 1 and not doc["member"]


def test_forbid_cert_verify_and_search(capsys):
    code, doc = run(capsys, "forbid-cert", "--m", "2", "--n", "2",
                    "--gens", "x^2+y^2", "--c", "0.5")
    assert code == 0 and doc["verdict"] == "pass"
    assert doc["max_depth"] <= 6
    code, doc = run(capsys, "forbid-cert", "--m", "2", "--n", "2",
                    "--gens", "x^2+y^2")
    assert code == 0 and doc["certificate"]["c"] > 0


def test_tangent_subcommand(tmp_path, capsys):
    csv = tmp_path / "points.csv"
    rows = [f"0,{2.0 ** -k}" for k in range(20)]
    rows += [f"0,{-(2.0 ** -k)}" for k in range(20)]
    csv.write_text("\n".join(rows))
    code, doc = run(capsys, "tangent", "--points", str(csv),
                    "--delta-out", "0.001")
    assert code == 0
    assert sorted(map(tuple, doc["directions"])) == [(0.0, -1.0), (0.0, 1.0)]


def test_verify_tame_exit_by_verdict(capsys):
    code, doc = run(capsys, "verify-tame", "--m", "2", "--n", "2",
                    "x^2/(x^2+y^2)")
    assert code == 0 and doc["verdict"] == "pass"
    code, doc = run(capsys, "verify-tame", "--m", "2", "--n", "2",
                    "--bound", "0.1", "x^2/(x^2+y^2)")
    assert code == 1 and doc["verdict"] == "fail"


def test_verify_flat_inconclusive_exit(capsys):
    # a borderline function: exit 2 distinguishes inconclusive from fail
    code, doc = run(capsys, "verify-flat", "--m", "2", "--n", "2",
                    "--omega", "1,0", "x^2")
    assert code == 2 and doc["verdict"] == "inconclusive"


def test_verify_negligible(capsys):
    code, doc = run(capsys, "verify-negligible", "--m", "2", "--n", "3",
                    "--omega", "0,0,1;0,0,-1", "--eps", "0.01", "y^3/z")
    assert code == 0 and doc["verdict"] == "pass"


def test_verify_implication_cert_file(tmp_path, capsys):
    cert = {"ideal": {"m": 2, "n": 3, "generators": ["x^2", "y^2 - x*z"]},
            "target": "x*y",
            "terms": [{"Q": "y^2 - x*z", "S": "-y/z", "C": 50.0}],
            "F": "y^3/z", "scope": "global"}
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(cert))
    code, doc = run(capsys, "verify-implication", "--cert", str(path))
    assert code == 0 and doc["verdict"] == "pass"
    assert len(doc["conclusions"]) == 2


def test_usage_errors(capsys):
    assert main(["bogus"]) == 64
    capsys.readouterr()
    assert main(["allow", "--m", "2", "--n", "2"]) == 64   # missing --gens
    capsys.readouterr()
    assert main(["tangent", "--points", "/nonexistent.csv"]) == 64
    capsys.readouterr()


def test_parse_error_is_usage_error(capsys):
    code, doc = run(capsys, "order", "--m", "2", "--n", "1", "x +")
    assert code == 64 and doc["error"] == "parse"


def test_gauge_reg(capsys):
    code, doc = run(capsys, "gauge-reg", "--gauge", "sqrt")
    assert code == 0 and doc["verdict"] == "pass"
    assert main(["gauge-reg", "--gauge", "nope"]) == 64
    capsys.readouterr()


def test_corpus_list_and_single_case(capsys):
    code, doc = run(capsys, "corpus", "list")
    assert code == 0 and len(doc["cases"]) >= 10
    ids = {c["id"] for c in doc["cases"]}
    assert "ex4-negligible" in ids
    code, doc = run(capsys, "corpus", "run", "ring-truncation-zero")
    assert code == 0 and doc["verdict"] == "pass"


def test_deterministic_output(capsys):
    outs = []
    for _ in range(2):
        main(["verify-negligible", "--m", "2", "--n", "3",
              "--omega", "0,0,1", "--eps", "0.1", "--seed", "7", "y^3/z"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
