import csv

import pytest

from dln import bench
from dln.bench import HEADER, BenchDivergence, parse_suite, run_bench, summary_path

SMALL = """
suite = ci
baseAxiomCount = 300
di_rates = 10%, 0.2
da_rates = 5%
ontologies = 2
queries = 4
priorities = spec, rank
timeoutSecs = 30
output = out.csv
"""


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_parse_suite(tmp_path):
    cfg = parse_suite(SMALL, tmp_path)
    assert cfg.axioms == 300
    assert cfg.di_rates == (0.1, 0.2)
    assert cfg.priorities == ("spec", "rank")
    assert cfg.timeout_secs == 30
    assert cfg.output == str(tmp_path / "out.csv")
    assert cfg.ontology_seeds() == [0, 1]


@pytest.mark.parametrize("bad", ["colour = red", "axioms = many", "suite = other", "strategies = fast", "guard = maybe"])
def test_bad_suite_files(bad):
    with pytest.raises(ValueError):
        parse_suite(bad)


def test_run_writes_csv_and_summary(tmp_path):
    cfg = parse_suite(SMALL, tmp_path)
    records, summary = run_bench(cfg)
    rows = _rows(cfg.output)
    assert rows[0] == HEADER
    assert len(rows) - 1 == len(records) == 2 * 2 * 2 * 4 * 4
    assert all(r[8] in ("0", "1") for r in rows[1:])
    srows = _rows(summary_path(cfg.output))
    assert len(srows) - 1 == len(summary) == 2 * 2 * 4


def test_determinism_modulo_wall_time(tmp_path):
    a = parse_suite(SMALL, tmp_path)
    b = parse_suite(SMALL.replace("out.csv", "again.csv"), tmp_path)
    run_bench(a)
    run_bench(b)
    strip = lambda rows: [r[:9] + r[10:] for r in rows]  # noqa: E731
    assert strip(_rows(a.output)) == strip(_rows(b.output))


def test_timeouts_are_censored(tmp_path):
    cfg = parse_suite(SMALL + "strategies = naive, mod\n", tmp_path)
    cfg.timeout_secs = -1
    records, summary = run_bench(cfg)
    assert all(r.answer == "timeout" and r.wall_ms == ">timeout" for r in records if r.strategy == "naive")
    for row in summary:
        if row["strategy"] == "naive":
            assert row["timeouts"] == row["runs"]
            assert row["mean_wall_ms"] != row["mean_wall_ms"]  # nan: nothing left to average


def test_divergence_fails_loudly(tmp_path, monkeypatch):
    real = bench.dln_entails

    def lying(kb, q, p, strategy, **kw):
        r = real(kb, q, p, strategy, **kw)
        if strategy == "mod":
            r.entailed = not r.entailed
        return r

    monkeypatch.setattr(bench, "dln_entails", lying)
    with pytest.raises(BenchDivergence):
        run_bench(parse_suite(SMALL, tmp_path))


def test_sweep_invariants(perf):
    cells, cfg = perf
    for p in cfg.priorities:
        for r in cfg.di_rates:
            mod, naive, modopt = (cells[(p, r, s)]["mean_wall_ms"] for s in ("mod", "naive", "modopt"))
            assert mod < naive
            assert modopt <= 1.1 * mod, (p, r, modopt, mod)
