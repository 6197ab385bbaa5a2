import csv
import io
import json

import numpy as np
import pytest

from pengrad.bench import (BenchCase, BenchReport, builtin_catalog, case_budget, emit_report,
                           load_cases, parse_start, run_bench)
from pengrad.polycore import parse_system, rss
from pengrad.solver import SolveConfig

CATALOG = {c.name: c for c in builtin_catalog()}
REQUIRED = ["rosenbrock-grad", "lorentz", "caprasse", "sendra", "wright", "katsura5", "noon5",
            "eco8", "redeco6", "redeco7", "redeco8", "cyclic7", "rediff3", "trinks", "wood",
            "quadfor2"]


def test_catalog_contents():
    assert set(REQUIRED) <= set(CATALOG)
    assert CATALOG["caprasse"].n == 4
    assert CATALOG["caprasse"].start.tolist() == [-2, 0, -2, 2]
    assert CATALOG["lorentz"].n == 4 and CATALOG["lorentz"].degree == 16
    assert CATALOG["sendra"].start.tolist() == [1, 1]
    for case in CATALOG.values():
        assert case.start.size == case.n
        assert case.provenance


@pytest.mark.parametrize("name, n, degree", [
    ("caprasse", 4, 144), ("cyclic7", 7, 5040), ("eco8", 8, 1458), ("katsura5", 6, 32),
    ("noon5", 5, 243), ("quadfor2", 4, 24), ("redeco6", 6, 16), ("redeco7", 7, 32),
    ("redeco8", 8, 64), ("rediff3", 3, 8), ("sendra", 2, 49), ("trinks", 6, 24),
    ("wood", 4, 36), ("wright", 5, 32),
])
def test_catalog_sizes_match_published_table(name, n, degree):
    assert (CATALOG[name].n, CATALOG[name].degree) == (n, degree)


def test_parse_start():
    assert parse_start("zeros", 3).tolist() == [0, 0, 0]
    assert parse_start("ones", 2).tolist() == [1, 1]
    assert parse_start("1, -2.5", 2).tolist() == [1, -2.5]
    with pytest.raises(ValueError):
        parse_start("1,2", 3)
    with pytest.raises(ValueError):
        parse_start("a,b", 2)


def test_case_start_length_checked():
    with pytest.raises(ValueError):
        BenchCase("bad", parse_system("vars: x\neq: x = 1"), [0.0, 1.0])


def test_budget():
    cfg = SolveConfig(max_iters=5000)
    assert case_budget(CATALOG["wood"], cfg) == 5000
    case = BenchCase("c", parse_system("vars: x\neq: x = 1"), [0.0],
                     published_iterations={"rss1rmax2": 1902})
    assert case_budget(case, cfg) == 19020


def test_run_bench_records_failures_and_continues():
    cases = [CATALOG["cyclic7"], CATALOG["caprasse"], CATALOG["wright"]]
    rep = run_bench(cases, methods=["rss1rmax2", "quasilinear"])
    names = [c.name for c in rep.cases]
    assert names == sorted(names)
    by = {c.name: {r.method: r for r in c.results} for c in rep.cases}
    assert by["caprasse"]["rss1rmax2"].status == "SOLVED"
    assert by["cyclic7"]["rss1rmax2"].status == "LOCAL_MIN"
    # caprasse is not quasi-linear: an error row, not an exception
    assert by["caprasse"]["quasilinear"].status == "ERROR"
    assert rep.solve_counts()["rss1rmax2"] == 2


def test_solved_rows_verified_independently():
    cases = [CATALOG[n] for n in ("lorentz", "sendra", "katsura5")]
    rep = run_bench(cases)
    for c in rep.cases:
        system = CATALOG[c.name].system
        for r in c.results:
            if r.status == "SOLVED":
                assert r.final_rss < 1e-8
                assert rss(system, np.array(r.final_x)) < 1e-8


def test_workers_do_not_change_report():
    cases = [CATALOG[n] for n in ("lorentz", "wright", "noon5")]
    a = emit_report(run_bench(cases), "json", timing=False)
    b = emit_report(run_bench(cases, workers=4), "json", timing=False)
    assert a == b


def test_empty_report_json():
    data = json.loads(emit_report(BenchReport(1e-8, 5000, "abc"), "json"))
    assert data == {"meta": {"tol": 1e-8, "max_iters": 5000, "config_hash": "abc"}, "cases": []}


def test_csv_one_case():
    rep = run_bench([CATALOG["wright"]], methods=["rss1rmax2"])
    rows = list(csv.reader(io.StringIO(emit_report(rep, "csv").decode())))
    assert len(rows) == 2
    assert rows[0][:5] == ["name", "n", "degree", "method", "status"]
    assert rows[1][:5] == ["wright", "5", "32", "rss1rmax2", "SOLVED"]


def test_table_layout():
    rep = run_bench([CATALOG["lorentz"], CATALOG["cyclic7"]], methods=["rss1rmax2", "pgnlm"])
    lines = emit_report(rep, "table").decode().splitlines()
    assert lines[0].split() == ["name", "n", "degree", "start", "rss1rmax2", "pgnlm"]
    assert lines[2].split() == ["cyclic7", "7", "5040", "zeros", "-", "-"]
    assert lines[3].split()[:4] == ["lorentz", "4", "16", "[1"]


def test_unsupported_format():
    with pytest.raises(ValueError):
        emit_report(BenchReport(1e-8, 1, "x"), "xml")


def test_load_cases_from_directory(tmp_path):
    (tmp_path / "tiny.sys").write_text("# start: 3\nvars: x\neq: x^2 = 4\n")
    cases = load_cases(tmp_path)
    assert cases[0].name == "tiny" and cases[0].start.tolist() == [3.0]
    with pytest.raises(FileNotFoundError):
        load_cases(tmp_path / "nope")
