import csv
import io
import json
import os

import pytest

from statward import cli, harness
from statward.reports import strip_timestamp


def call(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_periodic_two(capsys):
    code, out, _ = call(capsys, "classify", "--seq", "periodic(0,1)", "--p", "2")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == 1 and report["command"] == "classify"
    [v] = report["result"]["verdicts"]
    assert v["class"] == "StatPQuasiCauchy(p=2)" and v["status"] == "satisfied"
    assert report["config"]["N"] == 100000 and report["config"]["tolerance"] == "1/1000"


def test_density_csv_all_ones(capsys):
    code, out, _ = call(capsys, "density", "--seq", "periodic(0,1)", "--p", "1", "--eps", "1/2",
                        "--N", "1000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["p", "epsilon", "n", "count", "ambiguous", "density_num", "density_den", "density"]
    assert rows and all(r["density"] == "1" for r in rows)
    assert rows[-1]["n"] == "1000" and rows[-1]["count"] == "1000"


def test_theorems_inclusion_exit_zero(capsys):
    code, out, _ = call(capsys, "theorems", "--suite", "inclusion", "--trials", "5")
    assert code == 0
    body = json.loads(out)["result"]
    assert body["violations"] == 0
    assert body["suites"][0]["config"]["N"] == 10000


def test_theorems_violation_exit_two(capsys, monkeypatch):
    def fake(name, cfg, trials=None, seed=0):
        res = harness.SuiteResult(name)
        res.add("planted", False)
        return res

    monkeypatch.setattr(cli, "run_suite", fake)
    code, out, _ = call(capsys, "theorems", "--suite", "parser")
    assert code == 2
    assert json.loads(out)["result"]["violations"] == 1


def test_parser_suite_table(capsys):
    code, out, _ = call(capsys, "theorems", "--suite", "parser", "--format", "table")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].split() == ["suite", "case", "holds", "detail"]
    assert len(lines) == 2 + 25


@pytest.mark.parametrize("argv,needle", [
    (["classify", "--seq", "periodic(0,"], "position"),
    (["classify"], "--seq is required"),
    (["preserve", "--seq", "harmonic", "--fn", "foo(x)"], "--fn"),
    (["bogus"], "invalid choice"),
    ([], "choose a command"),
    (["classify", "--seq", "harmonic", "--tol", "abc"], "expected a rational"),
    (["classify", "--seq", "harmonic", "--N", "0"], "--N must be positive"),
])
def test_usage_errors_exit_one(capsys, argv, needle):
    code, out, err = call(capsys, *argv)
    assert code == 1
    assert out == ""
    assert needle in err


def test_grammar_hint_on_bad_sequence(capsys):
    code, _, err = call(capsys, "classify", "--seq", "harmonic +")
    assert code == 1
    assert "^" in err and "repeat_each" in err


def test_precondition_is_an_input_error(capsys):
    code, _, err = call(capsys, "preserve", "--fn", "sin(x)", "--seq", "periodic(0,1)", "--p", "1", "--N", "2000")
    assert code == 1
    assert "PreconditionNotMet" in err


def test_config_file_merges_under_flags(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# defaults\nN = 2000\neps = 1/2, 1/10\nseq = harmonic\ntol=0.01\n")
    code, out, _ = call(capsys, "classify", "--config", str(conf), "--N", "3000")
    assert code == 0
    cfg = json.loads(out)["config"]
    assert cfg["N"] == 3000
    assert cfg["eps"] == ["1/2", "1/10"]
    assert cfg["tolerance"] == "1/100"
    assert cfg["seq"] == "harmonic"
    conf.write_text("colour = blue\n")
    code, _, err = call(capsys, "classify", "--config", str(conf))
    assert code == 1 and "unknown key" in err


def test_suite_defaults_yield_to_explicit_flags():
    args = cli.build_parser().parse_args(["theorems", "--suite", "lattice", "--eps", "1/2"])
    rc = cli.resolve(args)
    cfg = harness.suite_config("lattice", rc.classifier(), rc.explicit)
    assert [str(e) for e in cfg.eps_grid] == ["1/2"]
    args = cli.build_parser().parse_args(["theorems", "--suite", "lattice"])
    rc = cli.resolve(args)
    cfg = harness.suite_config("lattice", rc.classifier(), rc.explicit)
    assert [str(e) for e in cfg.eps_grid] == ["1", "1/2", "1/10", "1/20"]
    assert cfg.N == 100000


def test_out_file_written_atomically(tmp_path, capsys):
    target = tmp_path / "sub" / "report.json"
    code, out, _ = call(capsys, "classify", "--seq", "harmonic", "--N", "2000", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"]["sequence"] == "harmonic"
    assert os.listdir(target.parent) == ["report.json"]


DETERMINISM_ARGV = [
    ["classify", "--seq", "0.5*harmonic + periodic(0,1)", "--p", "1,2", "--N", "3000"],
    ["profile", "--seq", "repeat_each(harmonic, 3)", "--N", "2000"],
    ["density", "--seq", "thm1_witness(p=3, above)", "--p", "1", "--N", "500"],
    ["preserve", "--fn", "sin(x)", "--seq", "harmonic", "--p", "2", "--N", "5000", "--eps", "1,1/2,1/10"],
    ["probe", "--fn", "sin(1/x) on (0,1)", "--samples", "256"],
    ["witness", "--fn", "sin(1/x) on (0,1)", "--max-n", "10"],
    ["theorems", "--suite", "algebra", "--trials", "10", "--N", "50"],
]


@pytest.mark.parametrize("argv", DETERMINISM_ARGV, ids=lambda a: a[0])
def test_same_argv_same_report(capsys, argv):
    first = call(capsys, *argv)
    second = call(capsys, *argv)
    assert first[0] == second[0] == 0
    assert strip_timestamp(first[1]) == strip_timestamp(second[1])
    csv1 = call(capsys, *argv, "--format", "csv")[1]
    assert csv1 == call(capsys, *argv, "--format", "csv")[1]


def test_version(capsys):
    with pytest.raises(SystemExit):
        cli.run(["--version"])
    assert capsys.readouterr().out.startswith("statward ")
