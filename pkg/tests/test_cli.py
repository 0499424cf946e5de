import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from univoque.cli import CSV_HEADER, EXIT_BOUNDARY, EXIT_NEAR_KL, EXIT_OK, EXIT_USAGE, main
from univoque.precise import PreciseReal, eval_at, parse_exact, precision
from univoque.words import EventuallyPeriodicSeq


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split(None, 1) for line in text.strip().splitlines())


def test_qs_two():
    code, text = run("qs", "2")
    f = fields(text)
    assert code == EXIT_OK
    assert f["classification"] == "BelowKL"
    assert f["gamma"] == "(1)^inf"
    assert abs(float(f["q_s"]) - 1.5) < 1e-12


def test_qs_one():
    code, text = run("qs", "1")
    f = fields(text)
    assert code == EXIT_OK
    assert f["classification"] == "EqualKL"
    assert f["q_s"].startswith("1.78723")


def test_qs_gap():
    code, text = run("qs", "0.7")
    f = fields(text)
    assert code == EXIT_OK
    assert f["classification"] == "AboveKL"
    assert f["gap"].startswith("1: [0.618034, 0.814527")


def test_qs_json():
    code, text = run("--json", "qs", "1.2")
    rec = json.loads(text)
    assert code == EXIT_OK
    assert rec["level"] == 2 and rec["classification"] == "BelowKL"
    assert rec["q_s"].startswith("1.64106165556")
    code2, text2 = run("qs", "1.2", "--json")
    assert text2 == text


def test_qs_near_kl_exit():
    code, text = run("qs", "1.0507", "--max-level", "2")
    assert code == EXIT_NEAR_KL
    assert fields(text)["classification"] == "NearKL"


def test_qs_boundary_exit():
    code, _ = run("qs", "1.2", "--precision-cap", "96", "--tol", "1e-30")
    assert code == EXIT_BOUNDARY
    assert run("qs", "1.2", "--precision-cap", "16")[0] == EXIT_USAGE


def test_qs_usage_errors():
    assert run("qs", "abc")[0] == EXIT_USAGE
    assert run("qs", "-2")[0] == EXIT_USAGE
    assert run("qs", "2", "--max-level", "0")[0] == EXIT_USAGE
    assert run("bogus")[0] == EXIT_USAGE


def test_constants_rows():
    code, text = run("constants", "--levels", "3")
    assert code == EXIT_OK
    rows = {}
    for line in text.splitlines()[1:]:
        parts = line.rsplit(None, 2)
        rows[parts[0].strip()] = parts[1]
    assert rows["q_1"].startswith("1.618033")
    assert rows["q_2"].startswith("1.75487")
    assert rows["q_KL"].startswith("1.78723")
    assert rows["z_2"].startswith("1.0507")
    assert abs(float(rows["gap-3 left"]) - 0.236068) < 5e-7
    assert "z_1,3" in rows
    assert run("constants", "--levels", "21")[0] == EXIT_USAGE


def test_constants_json():
    code, text = run("--json", "constants", "--levels", "2")
    names = [r["name"] for r in json.loads(text)]
    assert code == EXIT_OK
    assert names[:3] == ["q_1", "q_2", "q_KL"]


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == CSV_HEADER
    return rows[1:]


def test_figure_large_branch():
    code, text = run("figure", "--from", "2", "--to", "4", "--samples", "21")
    rows = read_csv(text)
    assert code == EXIT_OK and len(rows) == 21
    for x, q, level, gamma, cls in rows:
        places = len(q.split(".")[1])
        want = 1 + 1 / Fraction(x)
        assert abs(Fraction(q) - want) <= Fraction(1, 10**places)
        assert gamma == "(1)^inf" and level == "1" and cls == "BelowKL"


def test_figure_sorted_and_round_trip(tmp_path):
    path = tmp_path / "fig.csv"
    code, _ = run("figure", "--samples", "40", "--out", str(path))
    rows = read_csv(path.read_text())
    assert code == EXIT_OK and len(rows) == 40
    xs = [Fraction(r[0]) for r in rows]
    assert xs == sorted(xs)
    tol = Fraction(1, 10**12)
    with precision(256):
        for x, q, level, gamma, cls in rows:
            v = eval_at(EventuallyPeriodicSeq.parse(gamma), PreciseReal.exact(parse_exact(q)))
            lo, hi = v.bounds()
            assert abs((lo + hi) / 2 - Fraction(x)) <= 10 * tol


def test_figure_deterministic_and_parallel():
    a = run("figure", "--from", "1.1", "--to", "1.9", "--samples", "24")
    b = run("figure", "--from", "1.1", "--to", "1.9", "--samples", "24")
    c = run("figure", "--from", "1.1", "--to", "1.9", "--samples", "24", "--jobs", "2")
    assert a == b == c


def test_figure_errors(tmp_path):
    assert run("figure", "--from", "2", "--to", "2")[0] == EXIT_USAGE
    assert run("figure", "--samples", "1")[0] == EXIT_USAGE
    assert run("figure", "--samples", "3", "--out", str(tmp_path / "missing" / "f.csv"))[0] == EXIT_USAGE


def test_check_and_expand():
    assert run("check", "2", "1.5", "--depth", "60") == (EXIT_OK, "Unique\n")
    assert run("check", "3", "1.5") == (EXIT_OK, "Infeasible\n")
    code, text = run("check", "0.7", "1.7")
    assert text.startswith("Multiple")
    code, text = run("expand", "1", "1.754877666", "--digits", "8", "--algorithm", "quasi-greedy")
    assert (code, text) == (EXIT_OK, "11001100\n")
    assert run("expand", "1", "1.5", "--digits", "3") == (EXIT_OK, "101\n")
    assert run("check", "1", "2.5")[0] == EXIT_USAGE
    assert run("expand", "5", "1.5")[0] == EXIT_USAGE
    code, text = run("--json", "check", "2", "1.5")
    assert json.loads(text)["verdict"] == "Unique"


def test_environment_overrides():
    env = {"UNIVOQUE_MAX_LEVEL": "2", "UNIVOQUE_JSON": "1", "PATH": "/usr/bin:/bin"}
    res = subprocess.run([sys.executable, "-m", "univoque", "qs", "1.0507"], capture_output=True, text=True, env=env)
    assert res.returncode == EXIT_NEAR_KL
    assert json.loads(res.stdout)["classification"] == "NearKL"
