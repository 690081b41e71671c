from pathlib import Path

import pytest

from dln.parser import load_kb

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "dln" / "golden"
BENCH = Path(__file__).resolve().parents[1] / "benchmarks"


@pytest.fixture
def golden():
    def load(name):
        return load_kb(GOLDEN / f"{name}.dln")

    return load


@pytest.fixture(scope="session")
def perf(tmp_path_factory):
    """The DI-rate sweep, run once; summary rows keyed by (priority, di_rate, strategy)."""
    from dln.bench import load_suite, run_bench

    cfg = load_suite(BENCH / "perf.cfg")
    cfg.output = str(tmp_path_factory.mktemp("perf") / "perf.csv")
    _, rows = run_bench(cfg)
    return {(r["priority"], r["di_rate"], r["strategy"]): r for r in rows}, cfg
