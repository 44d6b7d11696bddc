"""Command-line interface: outputs, exit codes, determinism."""

import json

import pytest

from expocon.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_lyndon_words(capsys):
    code, out = run_cli(capsys, "lyndon", "--alphabet", "A:1,B:1", "--grade", "3")
    assert code == 0
    assert json.loads(out) == ["AAB", "ABB"]


def test_lyndon_bracket_output(capsys):
    code, out = run_cli(
        capsys, "lyndon", "--alphabet", "A1:1,A2:2,A3:3,A4:4", "--grade", "4", "--bracket"
    )
    assert code == 0
    assert json.loads(out) == [
        {"word": "A1 A1 A2", "bracket": "[A1,[A1,A2]]"},
        {"word": "A1 A3", "bracket": "[A1,A3]"},
        {"word": "A4", "bracket": "A4"},
    ]


def test_wcoeff_command(capsys):
    code, out = run_cli(
        capsys,
        "wcoeff",
        "--word",
        "A A B",
        "--expr",
        "exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)",
    )
    assert code == 0
    assert json.loads(out) == {"word": "AAB", "coefficient": "1/12"}


def test_wcoeff_parametric(capsys):
    code, out = run_cli(
        capsys,
        "wcoeff",
        "--word",
        "A",
        "--expr",
        "exp(b*B)*exp(a*A)*exp(a*A)*exp(b*B) - exp(A+B)",
        "--params",
        "a,b",
    )
    assert code == 0
    assert json.loads(out)["coefficient"] == "2*a - 1"


def test_expand_command(capsys):
    code, out = run_cli(
        capsys, "expand", "--expr", "exp(A+B)", "--max-grade", "2"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficients"]["AB"] == "1/2"
    assert doc["coefficients"]["Id"] == "1"


def test_conditions_command(capsys):
    code, out = run_cli(
        capsys,
        "conditions",
        "--ansatz",
        "exp(b*B)*exp(a*A)*exp(c*B + d*[B,[A,B]])*exp(a*A)*exp(b*B)",
        "--target",
        "exp(A+B)",
        "--params",
        "a,b,c,d",
        "--order",
        "4",
        "--self-adjoint",
    )
    assert code == 0
    doc = json.loads(out)
    assert [entry["word"] for entry in doc] == ["A", "B", "AAB", "ABB"]
    assert doc[0]["polynomial"] == "2*a - 1"


def test_magnus_target_conditions(capsys):
    code, out = run_cli(
        capsys,
        "conditions",
        "--ansatz",
        "exp(f11*A1)",
        "--target",
        "magnus",
        "--alphabet",
        "A1:1",
        "--params",
        "f11",
        "--order",
        "1",
        "--self-adjoint",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc == [{"word": "A1", "polynomial": "f11 - 1"}]


def test_leading_error_command(capsys):
    code, out = run_cli(
        capsys,
        "leading-error",
        "--expr",
        "exp(1/2*B)*exp(A)*exp(1/2*B) - exp(A+B)",
        "--max-grade",
        "3",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["grade"] == 3
    assert doc["terms"][0] == {"basis": "[A,[A,B]]", "coefficient": "1/12"}


def test_magnus_rhs_command(capsys):
    code, out = run_cli(capsys, "magnus-rhs", "--word", "A1 A2")
    assert code == 0
    assert json.loads(out) == {"word": "A1 A2", "coefficient": "-1/6"}


def test_repro_strang(capsys):
    code, out = run_cli(capsys, "repro", "strang")
    assert code == 0
    doc = json.loads(out)
    assert doc["matches_reference"] is True
    assert doc["coefficients"][7] == "1/12"


def test_repro_splitting4(capsys):
    code, out = run_cli(capsys, "repro", "splitting4")
    assert code == 0
    doc = json.loads(out)
    assert doc["matches_reference"] is True
    assert doc["solution"] == {"a": "1/2", "b": "1/6", "c": "2/3", "d": "1/72"}
    assert doc["c_b"] == ["1/2880", "-7/8640", "1/2160", "7/12960", "1/4320", "-41/155520"]


def test_repro_determinism(capsys):
    _, first = run_cli(capsys, "repro", "strang")
    _, second = run_cli(capsys, "repro", "strang")
    assert first == second


def test_quadrature_and_verify_roundtrip(tmp_path, capsys):
    from expocon.reference import _load

    table = _load("table_real.json")
    infile = tmp_path / "a.json"
    infile.write_text(json.dumps({"a": table["rows"], "complex": False}))
    outfile = tmp_path / "scheme.json"
    code, _ = run_cli(
        capsys, "quadrature", "--in", str(infile), "--inverse",
        "--digits", "30", "--out", str(outfile),
    )
    assert code == 0
    doc = json.loads(outfile.read_text())
    assert doc["J"] == 8 and doc["K"] == 4
    code, out = run_cli(
        capsys, "verify", "--scheme", str(outfile), "--order", "8",
        "--digits", "40", "--tol", "1e-15",
    )
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_failure_exit_code(tmp_path, capsys):
    from expocon.reference import _load

    table = _load("table_real.json")
    rows = [list(r) for r in table["rows"]]
    rows[0][0] = "0.25"
    infile = tmp_path / "a.json"
    infile.write_text(json.dumps({"a": rows, "complex": False}))
    outfile = tmp_path / "scheme.json"
    run_cli(capsys, "quadrature", "--in", str(infile), "--inverse", "--out", str(outfile))
    code, out = run_cli(
        capsys, "verify", "--scheme", str(outfile), "--order", "8",
        "--digits", "30", "--tol", "1e-15",
    )
    assert code == 2
    assert json.loads(out)["passed"] is False


def test_solve_command(tmp_path, capsys):
    sysfile = tmp_path / "sys.json"
    sysfile.write_text(
        json.dumps({"variables": ["x"], "equations": ["x^2 - 2"]})
    )
    code, out = run_cli(
        capsys, "solve", "--system", str(sysfile), "--starts", "20",
        "--digits", "40", "--seed", "1",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["starts_tried"] == 20
    assert 1 <= len(doc["solutions"]) <= 2
    assert all(s["is_real"] for s in doc["solutions"])


def test_bad_expression_is_a_usage_error(capsys):
    code = main(["wcoeff", "--word", "A", "--expr", "exp(A"])
    assert code == 1


def test_unknown_flag_exits_one():
    with pytest.raises(SystemExit) as err:
        main(["lyndon", "--alphabet", "A:1", "--no-such-flag"])
    assert err.value.code == 1


def test_missing_grade_flags_is_an_error(capsys):
    code = main(["lyndon", "--alphabet", "A:1,B:1"])
    assert code == 1
