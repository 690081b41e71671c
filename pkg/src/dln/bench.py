"""Benchmark harness: rate grid × ontologies × queries × priorities × strategies.

A suite file is a list of ``key = value`` lines::

    suite = ci
    axioms = 5000
    di_rates = 0.05, 0.10, 0.15
    da_rates = 0.15
    ontologies = 5
    queries = 20
    timeout_secs = 120
    output = results.csv

Every (ontology, query, priority, strategy) run gives one CSV row.  Runs that
hit the timeout are written with answer ``timeout`` and wall time
``>timeout`` and are left out of the means in the summary file.
"""

from __future__ import annotations

import configparser
import csv
import logging
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from statistics import mean

from .benchgen import GenConfig, apply_rates, gen_base, sample_queries
from .engine import Metrics, Timeout
from .modularity import _kb_index
from .priority import priority_for
from .query import STRATEGIES, dln_entails

log = logging.getLogger(__name__)

HEADER = "suite,seed,axioms,di_rate,da_rate,priority,strategy,query_id,answer,wall_ms,checks,rebuilds,module_size".split(",")

SUMMARY_HEADER = [
    "suite", "axioms", "di_rate", "da_rate", "priority", "strategy",
    "runs", "timeouts", "mean_wall_ms", "mean_checks", "mean_rebuilds", "mean_module_size",
]


class BenchDivergence(RuntimeError):
    """Two strategies gave different answers for the same query."""


@dataclass
class SuiteConfig:
    suite: str = "ci"
    axioms: int = 5000
    concepts: int = 0
    di_rates: tuple = (0.05, 0.10, 0.15, 0.20, 0.25)
    da_rates: tuple = (0.15,)
    n_inject: tuple = (0,)
    ontologies: int = 5
    seeds: tuple = ()
    queries: int = 20
    priorities: tuple = ("spec", "rank")
    strategies: tuple = STRATEGIES
    seed: int = 0
    timeout_secs: float = 120.0
    guard: str = "fallback"
    output: str = "bench.csv"

    def ontology_seeds(self) -> list:
        return list(self.seeds) if self.seeds else [self.seed + k for k in range(self.ontologies)]


# accepted spellings, compared after lower-casing and dropping "_" and "-"
_ALIASES = {
    "suite": "suite",
    "axioms": "axioms", "baseaxiomcount": "axioms",
    "concepts": "concepts", "baseconceptcount": "concepts",
    "dirates": "di_rates", "dirate": "di_rates", "citodirate": "di_rates", "synthdirate": "di_rates",
    "darates": "da_rates", "darate": "da_rates",
    "ninject": "n_inject", "ninjectcount": "n_inject",
    "ontologies": "ontologies",
    "seeds": "seeds",
    "queries": "queries",
    "priorities": "priorities", "priority": "priorities",
    "strategies": "strategies", "strategy": "strategies",
    "seed": "seed",
    "timeoutsecs": "timeout_secs", "timeout": "timeout_secs",
    "guard": "guard",
    "output": "output",
}


def _floats(v: str) -> tuple:
    out = []
    for x in v.split(","):
        x = x.strip()
        if x.endswith("%"):
            out.append(float(x[:-1]) / 100.0)
        elif x:
            out.append(float(x))
    return tuple(out)


def _ints(v: str) -> tuple:
    return tuple(int(x) for x in v.split(",") if x.strip())


def _words(v: str) -> tuple:
    return tuple(x.strip() for x in v.split(",") if x.strip())


_CONVERT = {
    "suite": str.strip,
    "axioms": int,
    "concepts": int,
    "di_rates": _floats,
    "da_rates": _floats,
    "n_inject": _ints,
    "ontologies": int,
    "seeds": _ints,
    "queries": int,
    "priorities": _words,
    "strategies": _words,
    "seed": int,
    "timeout_secs": float,
    "guard": str.strip,
    "output": str.strip,
}


def parse_suite(text: str, base_dir: Path | None = None) -> SuiteConfig:
    cp = configparser.ConfigParser(
        comment_prefixes=("#", ";"), inline_comment_prefixes=("#",), interpolation=None
    )
    cp.optionxform = str
    try:
        cp.read_string("[suite]\n" + text)
    except configparser.Error as e:
        raise ValueError(f"bad suite file: {e}".replace("\n", " ")) from e
    kw = {}
    for key, value in cp["suite"].items():
        norm = key.lower().replace("_", "").replace("-", "")
        name = _ALIASES.get(norm)
        if name is None:
            raise ValueError(f"unknown suite key {key!r}")
        try:
            kw[name] = _CONVERT[name](value)
        except ValueError as e:
            raise ValueError(f"bad value for {key!r}: {value!r}") from e
    cfg = SuiteConfig(**kw)
    if cfg.suite not in ("ci", "synth"):
        raise ValueError(f"suite must be 'ci' or 'synth', got {cfg.suite!r}")
    for s in cfg.strategies:
        if s not in STRATEGIES:
            raise ValueError(f"unknown strategy {s!r}")
    for p in cfg.priorities:
        if p not in ("spec", "specificity", "rank"):
            raise ValueError(f"unknown priority {p!r}")
    if cfg.guard not in ("fallback", "refuse"):
        raise ValueError(f"guard must be 'fallback' or 'refuse', got {cfg.guard!r}")
    if base_dir is not None and not Path(cfg.output).is_absolute():
        cfg.output = str(base_dir / cfg.output)
    return cfg


def load_suite(path) -> SuiteConfig:
    path = Path(path)
    return parse_suite(path.read_text(), path.parent)


@dataclass
class BenchRecord:
    suite: str
    seed: int
    axioms: int
    di_rate: float
    da_rate: float
    priority: str
    strategy: str
    query_id: int
    answer: str
    wall_ms: str
    checks: int
    rebuilds: int
    module_size: int
    elapsed: float = field(default=0.0, compare=False)  # numeric wall time, not written

    @property
    def timed_out(self) -> bool:
        return self.answer == "timeout"

    def row(self) -> list:
        return [getattr(self, f.name) for f in fields(self) if f.name in HEADER]


def gen_config(cfg: SuiteConfig, di_rate: float, da_rate: float, n_inject: int, seed: int) -> GenConfig:
    rates = {"ci_rate": di_rate} if cfg.suite == "ci" else {"synth_rate": di_rate}
    return GenConfig(
        base_axioms=cfg.axioms, base_concepts=cfg.concepts, da_rate=da_rate, n_inject=n_inject, seed=seed, **rates
    )


def _suite_label(cfg: SuiteConfig, n_inject: int) -> str:
    return cfg.suite if not n_inject else f"{cfg.suite}+n{n_inject}"


def prepare(kb, priorities) -> dict:
    """Per-KB preprocessing kept out of the per-query timings."""
    _kb_index(kb)
    return {p: priority_for(kb, p) for p in priorities}


def run_cells(cfg: SuiteConfig, progress=None):
    """Yield BenchRecords for the whole grid, checking answer agreement per query."""
    bases: dict = {}
    for n_inject in cfg.n_inject:
        for di_rate in cfg.di_rates:
            for da_rate in cfg.da_rates:
                for oseed in cfg.ontology_seeds():
                    gc = gen_config(cfg, di_rate, da_rate, n_inject, oseed)
                    key = (cfg.axioms, cfg.concepts, oseed)
                    if key not in bases:
                        bases[key] = gen_base(gc, oseed)
                    kb = apply_rates(bases[key], gc, oseed)
                    qs = sample_queries(kb, cfg.queries, oseed)
                    prios = prepare(kb, cfg.priorities)
                    label = _suite_label(cfg, n_inject)
                    for pname in cfg.priorities:
                        for qi, q in enumerate(qs):
                            answers = {}
                            for strat in cfg.strategies:
                                m = Metrics()
                                try:
                                    r = dln_entails(
                                        kb, q, prios[pname], strat, seed=oseed, guard=cfg.guard,
                                        metrics=m, timeout=cfg.timeout_secs,
                                    )
                                    ans, wall = str(int(r.entailed)), f"{m.wall_ms:.3f}"
                                    answers[strat] = r.entailed
                                except Timeout:
                                    ans, wall = "timeout", ">timeout"
                                rec = BenchRecord(
                                    label, oseed, cfg.axioms, di_rate, da_rate, pname, strat, qi, ans, wall,
                                    m.checks, m.rebuilds, m.module_size, m.wall_ms,
                                )
                                if progress:
                                    progress(rec)
                                yield rec
                            if len(set(answers.values())) > 1:
                                raise BenchDivergence(
                                    f"{label} seed={oseed} di={di_rate} da={da_rate} {pname} query {qi} ({q}): {answers}"
                                )


def summarize(records) -> list:
    """One row per (suite, axioms, di_rate, da_rate, priority, strategy)."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.suite, r.axioms, r.di_rate, r.da_rate, r.priority, r.strategy), []).append(r)
    out = []
    for key, rs in groups.items():
        done = [r for r in rs if not r.timed_out]
        avg = (lambda xs: mean(xs) if xs else float("nan"))
        out.append(
            dict(
                zip(SUMMARY_HEADER, key),
                runs=len(rs),
                timeouts=len(rs) - len(done),
                mean_wall_ms=avg([r.elapsed for r in done]),
                mean_checks=avg([r.checks for r in done]),
                mean_rebuilds=avg([r.rebuilds for r in done]),
                mean_module_size=avg([r.module_size for r in done]),
            )
        )
    return out


def summary_path(output) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".summary" + (p.suffix or ".csv"))


def write_csv(records, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for r in records:
            w.writerow(r.row())


def write_summary(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, SUMMARY_HEADER)
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.3f}" if isinstance(v, float) else v) for k, v in row.items()})


def run_bench(cfg: SuiteConfig | str | Path, progress=None) -> tuple:
    """Run a suite, write the CSV and its summary; return (records, summary rows)."""
    if not isinstance(cfg, SuiteConfig):
        cfg = load_suite(cfg)
    t0 = time.perf_counter()
    records = list(run_cells(cfg, progress))
    rows = summarize(records)
    write_csv(records, cfg.output)
    write_summary(rows, summary_path(cfg.output))
    log.info("%d runs in %.1f s", len(records), time.perf_counter() - t0)
    return records, rows
