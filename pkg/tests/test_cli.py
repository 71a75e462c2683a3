import io
import json

import pytest

from kbernstein import cli
from kbernstein.errors import InvalidArgumentError


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_norm_single_pole_json():
    code, text = run("norm", "--poles", "0.5")
    assert code == 0
    assert '"norm": 0.7453559925' in text  # sqrt(5) / 3
    (rec,) = json.loads(text)
    assert rec["n"] == 1 and rec["gram_size"] == 1


def test_norm_complex_poles_csv():
    code, text = run("norm", "--poles", "0.3+0.2i,-0.1i", "--format", "csv")
    assert code == 0
    header, row = text.splitlines()
    assert header == "n,r,norm,lambda_max,gram_size,iterations,residual"
    assert row.startswith("2,")


def test_sweep_monomial_row():
    code, text = run("sweep", "--r", "0", "--n", "16", "--format", "csv")
    assert code == 0
    header, row = text.splitlines()
    assert header == "n,r,norm,ratio,a_lower,A_upper,legacy_52,limit"
    assert row.startswith("16,0,15.0,0.9375,")
    assert row.endswith(",1.0")


def test_sweep_rows_sorted():
    code, text = run("sweep", "--n", "8,2", "--r", "0.5,0")
    assert code == 0
    keys = [tuple(line.split(",")[:2]) for line in text.splitlines()[1:]]
    assert keys == [("2", "0"), ("2", "0.5"), ("8", "0"), ("8", "0.5")]


def test_output_is_byte_identical():
    argv = ("embeddings", "--space", "besov:1", "--n", "4,8", "--r", "0.5",
            "--trials", "4", "--seed", "9")
    assert run(*argv) == run(*argv)


def test_emit_contract():
    rec = {"n": 4, "r": 0.5, "norm": 2.0, "ratio": 0.25, "a_lower": 0.1, "A_upper": 2.0,
           "legacy_52": 20.0, "limit": 3.0}
    text = cli.emit([rec], "csv")
    assert text.splitlines()[0] == "n,r,norm,ratio,a_lower,A_upper,legacy_52,limit"
    assert text.endswith("\n") and "\r" not in text
    two = cli.emit([dict(rec, n=8), dict(rec, n=4, r=0.7), rec], "csv").splitlines()
    assert [line.split(",")[:2] for line in two[1:]] == [["4", "0.5"], ["4", "0.7"], ["8", "0.5"]]
    assert json.loads(cli.emit([rec], "json")) == [rec]
    with pytest.raises(InvalidArgumentError):
        cli.emit([], "csv")


def test_twelve_significant_digits():
    text = cli.emit([{"x": 1 / 3, "y": 2.0}], "csv")
    assert text.splitlines()[1] == "0.333333333333,2.0"


@pytest.mark.parametrize("text, expected", [
    ("0.5", 0.5), ("0.3+0.2i", 0.3 + 0.2j), ("-0.1i", -0.1j), ("i", 1j), ("0.3-i", 0.3 - 1j),
])
def test_parse_complex(text, expected):
    assert cli.parse_complex(text) == expected


def test_parse_complex_rejects_garbage():
    with pytest.raises(InvalidArgumentError):
        cli.parse_complex("abc")


def test_parse_ranges():
    assert cli.parse_list("4..64x2", int) == [4, 8, 16, 32, 64]
    assert cli.parse_list("0..0.3+0.1") == [0.0, 0.1, 0.2, 0.3]
    assert cli.parse_list("2,3..5", int) == [2, 3, 4, 5]
    with pytest.raises(InvalidArgumentError):
        cli.parse_list("4..64x1", int)
    with pytest.raises(InvalidArgumentError):
        cli.parse_list("", int)


@pytest.mark.parametrize("argv", [
    ("norm", "--poles", "1.2"),
    ("norm", "--poles", "0.5", "--grid", "100"),
    ("sweep", "--n", "4", "--r", "1.0"),
    ("extremal", "--n", "100", "--r", "0.5", "--s", "3"),
    ("embeddings", "--space", "bmo", "--n", "4", "--r", "0.5"),
    ("bogus",),
    (),
])
def test_argument_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_extremal_output():
    code, text = run("extremal", "--n", "100", "--s", "10", "--r", "0.5")
    assert code == 0
    (rec,) = json.loads(text)
    assert rec["Q"] == 201.0
    assert rec["measured"] >= rec["certified_lower"] >= 234.0


def test_bounds_output_columns():
    code, text = run("bounds", "--n", "4", "--r", "0.5", "--format", "csv")
    assert code == 0
    assert text.splitlines()[0].endswith(",limit,en_norm,distance")


def test_violation_exits_1(monkeypatch):
    from kbernstein import bounds
    from kbernstein.errors import BoundViolation

    def boom(*args, **kwargs):
        raise BoundViolation("forced")

    monkeypatch.setattr(bounds, "extremal_certificate", boom)
    assert run("extremal", "--n", "100", "--r", "0.5")[0] == 1


def test_verify_failure_exits_1(monkeypatch):
    from kbernstein import verification
    monkeypatch.setattr(verification, "CHECKS", [("always fails", lambda: (False, "x"), True)])
    monkeypatch.setattr(cli, "run_checks", verification.run_checks)
    code, text = run("verify")
    assert code == 1
    assert text.startswith("FAIL")


@pytest.mark.slow
def test_verify_passes():
    code, text = run("verify")
    assert code == 0, text
    assert text.rstrip().endswith("all checks passed")
